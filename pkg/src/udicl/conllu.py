"""CoNLL-U parsing, validation and serialization.

The sentence/token model defined here is the substrate every other module
consumes.  All types are immutable after construction; a parsed document
serializes back to its canonical input byte for byte.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

COLUMN_COUNT = 10

_RANGE_ID_RE = re.compile(r"^\d+-\d+$")
_EMPTY_ID_RE = re.compile(r"^\d+\.\d+$")


class ConlluError(ValueError):
    """Raised when a document cannot be parsed; carries (line, message) pairs."""

    def __init__(self, errors: list[tuple[int, str]]):
        self.errors = errors
        super().__init__("; ".join(f"line {n}: {m}" for n, m in errors))


@dataclass(frozen=True)
class Token:
    """One syntactic word (a 10-column CoNLL-U row).

    Empty columns ("_") are stored as the empty string; `feats` keeps the
    original pair order so serialization is byte-faithful.
    """

    id: int
    form: str
    lemma: str
    upos: str
    xpos: str
    feats: tuple[tuple[str, str], ...]
    head: int
    deprel: str
    deps: str
    misc: str

    def feat(self, name: str) -> str:
        for key, value in self.feats:
            if key == name:
                return value
        return ""

    def attribute(self, name: str) -> str:
        """Look up an attribute by name; supports "feat:<Name>" keys."""
        if name.startswith("feat:"):
            return self.feat(name[5:])
        if name in ("form", "lemma", "upos", "xpos", "deprel", "deps", "misc"):
            return getattr(self, name)
        if name == "id":
            return str(self.id)
        if name == "head":
            return str(self.head)
        raise KeyError(name)


@dataclass(frozen=True)
class Violation:
    token_id: int | None
    invariant: str
    message: str


@dataclass(frozen=True)
class Sentence:
    """One dependency tree plus its verbatim comment lines.

    Multiword-token ranges ("4-5") and empty nodes ("5.1") are not part of
    the tree; their raw rows are kept in `extra_rows` as (position, line)
    where position counts the regular tokens emitted before the row.
    """

    tokens: tuple[Token, ...]
    metadata: tuple[str, ...] = ()
    source_id: str = ""
    text: str = ""
    extra_rows: tuple[tuple[int, str], ...] = ()

    def token_by_id(self, tid: int) -> Token:
        return self.tokens[tid - 1]

    def root(self) -> Token:
        for tok in self.tokens:
            if tok.head == 0:
                return tok
        raise ValueError(f"sentence {self.source_id!r} has no root")

    def source_text(self) -> str:
        """The sentence's surface string: `# text = ...` if present, else joined forms."""
        return self.text if self.text else " ".join(t.form for t in self.tokens)


@dataclass(frozen=True)
class Document:
    sentences: tuple[Sentence, ...]
    origin: str = ""
    parse_source: str = "automatic"  # "automatic" | "gold"


def _parse_feats(raw: str, line_no: int, errors: list[tuple[int, str]]) -> tuple[tuple[str, str], ...]:
    if raw == "_":
        return ()
    pairs = []
    for item in raw.split("|"):
        if "=" not in item:
            errors.append((line_no, f"malformed FEATS item {item!r}"))
            return ()
        key, value = item.split("=", 1)
        pairs.append((key, value))
    return tuple(pairs)


def _format_feats(pairs: tuple[tuple[str, str], ...]) -> str:
    if not pairs:
        return "_"
    return "|".join(f"{k}={v}" for k, v in pairs)


def _finish_sentence(
    comments: list[str],
    rows: list[tuple[int, str]],
    origin: str,
    index: int,
    errors: list[tuple[int, str]],
) -> Sentence | None:
    tokens: list[Token] = []
    extra_rows: list[tuple[int, str]] = []
    first_line = rows[0][0] if rows else 0

    for line_no, line in rows:
        cols = line.split("\t")
        if len(cols) != COLUMN_COUNT:
            errors.append((line_no, f"expected {COLUMN_COUNT} columns, got {len(cols)}"))
            continue
        if _RANGE_ID_RE.match(cols[0]) or _EMPTY_ID_RE.match(cols[0]):
            extra_rows.append((len(tokens), line))
            continue
        try:
            tid = int(cols[0])
        except ValueError:
            errors.append((line_no, f"non-integer id {cols[0]!r}"))
            continue
        try:
            head = int(cols[6])
        except ValueError:
            errors.append((line_no, f"non-integer head {cols[6]!r}"))
            continue
        tokens.append(
            Token(
                id=tid,
                form="" if cols[1] == "_" else cols[1],
                lemma="" if cols[2] == "_" else cols[2],
                upos="" if cols[3] == "_" else cols[3],
                xpos="" if cols[4] == "_" else cols[4],
                feats=_parse_feats(cols[5], line_no, errors),
                head=head,
                deprel="" if cols[7] == "_" else cols[7],
                deps="" if cols[8] == "_" else cols[8],
                misc="" if cols[9] == "_" else cols[9],
            )
        )

    source_id = ""
    text = ""
    for comment in comments:
        body = comment[1:].strip()
        if "=" in body:
            key, value = body.split("=", 1)
            key = key.strip()
            if key == "sent_id":
                source_id = value.strip()
            elif key == "text":
                text = value.strip()
    if not source_id:
        source_id = f"{origin}#{index}"

    sentence = Sentence(
        tokens=tuple(tokens),
        metadata=tuple(comments),
        source_id=source_id,
        text=text,
        extra_rows=tuple(extra_rows),
    )
    for violation in validate(sentence):
        errors.append((first_line, f"token {violation.token_id}: {violation.message}"))
    return sentence


def parse_document(text: str | Iterable[str], origin: str = "", parse_source: str = "automatic") -> Document:
    """Parse CoNLL-U text into a Document.

    A document containing any malformed line or invalid tree is rejected
    whole: one ConlluError reports every problem with its line number.
    """
    if isinstance(text, str):
        lines = text.split("\n")
        # a trailing newline produces one empty trailing element, not a line
        if lines and lines[-1] == "":
            lines.pop()
    else:
        lines = [ln.rstrip("\n") for ln in text]

    errors: list[tuple[int, str]] = []
    sentences: list[Sentence] = []
    comments: list[str] = []
    rows: list[tuple[int, str]] = []

    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r")
        if line == "":
            if comments or rows:
                sent = _finish_sentence(comments, rows, origin, len(sentences), errors)
                if sent is not None:
                    sentences.append(sent)
                comments, rows = [], []
            continue
        if line.startswith("#"):
            comments.append(line)
        else:
            rows.append((line_no, line))
    if comments or rows:
        sent = _finish_sentence(comments, rows, origin, len(sentences), errors)
        if sent is not None:
            sentences.append(sent)

    if errors:
        raise ConlluError(errors)
    return Document(sentences=tuple(sentences), origin=origin, parse_source=parse_source)


def serialize_sentence(sentence: Sentence) -> str:
    """Canonical CoNLL-U for one sentence: comments, rows, no trailing blank line."""
    lines = list(sentence.metadata)
    pending = list(sentence.extra_rows)  # encounter order; positions nondecreasing
    cursor = 0
    out_rows: list[str] = []
    for position, tok in enumerate(sentence.tokens):
        while cursor < len(pending) and pending[cursor][0] <= position:
            out_rows.append(pending[cursor][1])
            cursor += 1
        out_rows.append(
            "\t".join(
                (
                    str(tok.id),
                    tok.form or "_",
                    tok.lemma or "_",
                    tok.upos or "_",
                    tok.xpos or "_",
                    _format_feats(tok.feats),
                    str(tok.head),
                    tok.deprel or "_",
                    tok.deps or "_",
                    tok.misc or "_",
                )
            )
        )
    while cursor < len(pending):
        out_rows.append(pending[cursor][1])
        cursor += 1
    return "\n".join(lines + out_rows)


def serialize(doc: Document) -> str:
    """Canonical CoNLL-U text: LF line endings, blank line after each sentence."""
    if not doc.sentences:
        return ""
    return "".join(serialize_sentence(s) + "\n\n" for s in doc.sentences)


def validate(sentence: Sentence) -> list[Violation]:
    """Check every token and sentence invariant; empty list means well-formed."""
    violations: list[Violation] = []
    tokens = sentence.tokens
    ids = [t.id for t in tokens]

    for expected, tok in enumerate(tokens, start=1):
        if tok.id != expected:
            violations.append(
                Violation(tok.id, "consecutive-ids", f"id {tok.id} at position {expected} (ids must run 1..n)")
            )
    id_set = set(ids)
    roots = [t for t in tokens if t.head == 0]

    for tok in tokens:
        if tok.head == tok.id:
            violations.append(Violation(tok.id, "self-head", f"head {tok.head} equals id (cycle)"))
        elif tok.head != 0 and tok.head not in id_set:
            violations.append(Violation(tok.id, "head-range", f"head {tok.head} out of range"))
        if tok.head == 0 and tok.deprel != "root":
            violations.append(Violation(tok.id, "root-deprel", f"head 0 requires deprel 'root', got {tok.deprel!r}"))
        if tok.deprel == "root" and tok.head != 0:
            violations.append(Violation(tok.id, "root-deprel", f"deprel 'root' requires head 0, got {tok.head}"))

    if tokens and len(roots) != 1:
        violations.append(Violation(None, "single-root", f"expected exactly one root, found {len(roots)}"))

    # cycle detection: walk head links from every token, id-consecutiveness permitting
    if not any(v.invariant in ("consecutive-ids", "head-range", "self-head") for v in violations):
        by_id = {t.id: t for t in tokens}
        state: dict[int, int] = {}  # 0 in-progress, 1 done
        for tok in tokens:
            path = []
            cur = tok.id
            while cur != 0 and state.get(cur) != 1:
                if cur in path:
                    violations.append(Violation(cur, "cycle", f"head links cycle through id {cur}"))
                    break
                path.append(cur)
                cur = by_id[cur].head
            for seen in path:
                state[seen] = 1
    return violations
