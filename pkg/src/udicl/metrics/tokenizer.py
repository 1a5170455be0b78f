"""The mteval-style "13a" tokenization used by the n-gram metrics."""
from __future__ import annotations

import re

_RULES = [
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),   # period/comma unless preceded by digit
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),   # period/comma unless followed by digit
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),        # dash after a digit
]


def tokenize_13a(text: str) -> list[str]:
    """Tokenize one segment: punctuation split off, entities unescaped."""
    norm = text.replace("<skipped>", "")
    norm = norm.replace("-\n", "")
    norm = norm.replace("\n", " ")
    if "&" in norm:
        norm = norm.replace("&quot;", '"')
        norm = norm.replace("&amp;", "&")
        norm = norm.replace("&lt;", "<")
        norm = norm.replace("&gt;", ">")
    norm = f" {norm} "
    for pattern, repl in _RULES:
        norm = pattern.sub(repl, norm)
    return norm.split()
