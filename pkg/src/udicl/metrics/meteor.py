"""meteor_lite: unigram-alignment score with exact and stemmed matching.

Deliberately reduced variant: no synonym stage (it would pull in an external
lexical database), and fragmentation is measured as maximal runs of matched
hypothesis positions, counting boundaries, so a single contiguous alignment
carries no penalty and gaining a match never lowers the score.  Reports label
the metric "meteor_lite" to keep it distinct from full METEOR numbers.
"""
from __future__ import annotations

from udicl.metrics.stemmer import porter_stem
from udicl.metrics.tokenizer import tokenize_13a

ALPHA_RECALL_WEIGHT = 9  # Fmean = 10PR / (R + 9P)
PENALTY_WEIGHT = 0.5
PENALTY_POWER = 3


def _tokens(text: str) -> list[str]:
    return [t.lower() for t in tokenize_13a(text)]


def _greedy_stage(
    hyp: list[str], ref: list[str], hyp_free: list[int], ref_free: list[int], key
) -> list[tuple[int, int]]:
    pairs = []
    remaining = list(ref_free)
    for hi in list(hyp_free):
        target = key(hyp[hi])
        for pos, ri in enumerate(remaining):
            if key(ref[ri]) == target:
                pairs.append((hi, ri))
                hyp_free.remove(hi)
                remaining.pop(pos)
                break
    ref_free[:] = remaining
    return pairs


def align(hyp: list[str], ref: list[str]) -> list[tuple[int, int]]:
    """(hyp index, ref index) pairs: exact matches first, then stem matches."""
    hyp_free = list(range(len(hyp)))
    ref_free = list(range(len(ref)))
    pairs = _greedy_stage(hyp, ref, hyp_free, ref_free, key=lambda w: w)
    pairs += _greedy_stage(hyp, ref, hyp_free, ref_free, key=porter_stem)
    return sorted(pairs)


def _chunks(pairs: list[tuple[int, int]]) -> int:
    """Maximal runs of consecutive matched hypothesis positions."""
    if not pairs:
        return 0
    indices = sorted(h for h, _ in pairs)
    count = 1
    for a, b in zip(indices, indices[1:]):
        if b != a + 1:
            count += 1
    return count


def sentence_meteor(hypothesis: str, reference: str) -> float:
    hyp = _tokens(hypothesis)
    ref = _tokens(reference)
    if not hyp or not ref:
        return 0.0
    pairs = align(hyp, ref)
    matches = len(pairs)
    if matches == 0:
        return 0.0
    precision = matches / len(hyp)
    recall = matches / len(ref)
    fmean = 10 * precision * recall / (recall + ALPHA_RECALL_WEIGHT * precision)
    penalty = PENALTY_WEIGHT * ((_chunks(pairs) - 1) / matches) ** PENALTY_POWER
    return fmean * (1 - penalty)


def meteor_lite(hypotheses: list[str], references: list[str]) -> float:
    """Corpus score in [0, 1]: mean of the segment scores."""
    if len(hypotheses) != len(references):
        raise ValueError(f"{len(hypotheses)} hypotheses vs {len(references)} references")
    if not hypotheses:
        raise ValueError("need at least one segment")
    return sum(sentence_meteor(h, r) for h, r in zip(hypotheses, references)) / len(hypotheses)
