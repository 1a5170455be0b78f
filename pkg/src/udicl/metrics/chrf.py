"""chrF++: character n-gram F-score with word-bigram extension (beta = 2).

Statistics are accumulated per segment against its reference and summed over
the corpus; the final score averages per-order F-scores over the orders that
actually occur.
"""
from __future__ import annotations

import string
from collections import Counter

from udicl import __version__

CHAR_ORDER = 6
WORD_ORDER = 2
BETA = 2

_EPS = 1e-16
_PUNCTS = set(string.punctuation)


def chrf_signature(n_segments: int, char_order: int = CHAR_ORDER, word_order: int = WORD_ORDER) -> str:
    return (
        f"nrefs:{n_segments}|case:mixed|eff:yes|nc:{char_order}|nw:{word_order}"
        f"|space:no|version:{__version__}"
    )


def _separate_punctuation(text: str) -> list[str]:
    """Word tokens for the ++ part: one leading or trailing punctuation mark split off."""
    tokens: list[str] = []
    for word in text.split():
        if len(word) == 1:
            tokens.append(word)
        elif word[-1] in _PUNCTS:
            tokens.extend([word[:-1], word[-1]])
        elif word[0] in _PUNCTS:
            tokens.extend([word[0], word[1:]])
        else:
            tokens.append(word)
    return tokens


def _char_ngrams(text: str, n: int) -> Counter:
    joined = "".join(text.split())
    return Counter(joined[i : i + n] for i in range(len(joined) - n + 1))


def _word_ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def _all_ngrams(text: str, char_order: int, word_order: int) -> list[Counter]:
    grams = [_char_ngrams(text, n) for n in range(1, char_order + 1)]
    if word_order > 0:
        tokens = _separate_punctuation(text)
        grams.extend(_word_ngrams(tokens, n) for n in range(1, word_order + 1))
    return grams


def segment_statistics(hyp: str, ref: str, char_order: int = CHAR_ORDER, word_order: int = WORD_ORDER) -> list[int]:
    """Flat [hyp_count, ref_count, match_count] triples for each order."""
    stats: list[int] = []
    for hyp_grams, ref_grams in zip(
        _all_ngrams(hyp, char_order, word_order), _all_ngrams(ref, char_order, word_order)
    ):
        match = sum(min(count, ref_grams[g]) for g, count in hyp_grams.items() if g in ref_grams)
        stats.extend([sum(hyp_grams.values()), sum(ref_grams.values()), match])
    return stats


def f_score_from_statistics(stats: list[int], beta: int = BETA) -> float:
    order = len(stats) // 3
    factor = beta**2
    score = 0.0
    effective_order = 0
    for i in range(order):
        n_hyp, n_ref, n_match = stats[3 * i : 3 * i + 3]
        prec = n_match / n_hyp if n_hyp > 0 else _EPS
        rec = n_match / n_ref if n_ref > 0 else _EPS
        denom = factor * prec + rec
        score += ((1 + factor) * prec * rec / denom) if denom > 0 else _EPS
        if n_hyp > 0 and n_ref > 0:
            effective_order += 1
    if effective_order == 0:
        return 0.0
    return 100 * score / effective_order


def chrf(
    hypotheses: list[str],
    references: list[str],
    word_order: int = WORD_ORDER,
    char_order: int = CHAR_ORDER,
    beta: int = BETA,
) -> float:
    if len(hypotheses) != len(references):
        raise ValueError(f"{len(hypotheses)} hypotheses vs {len(references)} references")
    if not hypotheses:
        raise ValueError("need at least one segment")
    totals = [0] * (3 * (char_order + word_order))
    for hyp, ref in zip(hypotheses, references):
        for i, value in enumerate(segment_statistics(hyp, ref, char_order, word_order)):
            totals[i] += value
    return f_score_from_statistics(totals, beta)


def sentence_chrf(hypothesis: str, reference: str, word_order: int = WORD_ORDER) -> float:
    return f_score_from_statistics(segment_statistics(hypothesis, reference, CHAR_ORDER, word_order))
