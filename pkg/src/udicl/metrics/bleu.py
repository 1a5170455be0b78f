"""Corpus BLEU with the two preset configurations used across the experiments.

The default preset is plain corpus BLEU (4-grams, no smoothing).  The relaxed
preset (3-grams, effective order, floor smoothing at 0.1) keeps short or
badly degraded hypotheses from collapsing whole-corpus scores to zero.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from udicl import __version__
from udicl.metrics.tokenizer import tokenize_13a

_LOG_ZERO = -9999999999


@dataclass(frozen=True)
class BleuConfig:
    max_ngram: int = 4
    effective_order: bool = False
    smoothing: str = "none"  # "none" | "floor"
    smooth_value: float = 0.1
    tokenizer: str = "13a"
    case: str = "mixed"

    def __post_init__(self):
        if self.smoothing not in ("none", "floor"):
            raise ValueError(f"unknown smoothing {self.smoothing!r}")
        if self.tokenizer != "13a" or self.case != "mixed":
            raise ValueError("only tok:13a with mixed case is supported")


BLEU_DEFAULT = BleuConfig()
BLEU_RELAXED = BleuConfig(max_ngram=3, effective_order=True, smoothing="floor", smooth_value=0.1)


def bleu_signature(cfg: BleuConfig, n_segments: int) -> str:
    smooth = "none" if cfg.smoothing == "none" else f"floor[{cfg.smooth_value:.2f}]"
    eff = "yes" if cfg.effective_order else "no"
    return f"nrefs:{n_segments}|case:{cfg.case}|eff:{eff}|tok:{cfg.tokenizer}|smooth:{smooth}|version:{__version__}"


def _ngram_counts(tokens: list[str], max_n: int) -> Counter:
    counts: Counter = Counter()
    for n in range(1, max_n + 1):
        for i in range(len(tokens) - n + 1):
            counts[tuple(tokens[i : i + n])] += 1
    return counts


def _segment_stats(hyp: str, ref: str, max_n: int) -> tuple[int, int, list[int], list[int]]:
    hyp_tokens = tokenize_13a(hyp)
    ref_tokens = tokenize_13a(ref)
    hyp_ngrams = _ngram_counts(hyp_tokens, max_n)
    ref_ngrams = _ngram_counts(ref_tokens, max_n)
    correct = [0] * max_n
    total = [0] * max_n
    for ngram, count in hyp_ngrams.items():
        n = len(ngram)
        total[n - 1] += count
        if ngram in ref_ngrams:
            correct[n - 1] += min(count, ref_ngrams[ngram])
    return len(hyp_tokens), len(ref_tokens), correct, total


def _my_log(value: float) -> float:
    return _LOG_ZERO if value == 0.0 else math.log(value)


def compute_bleu(
    correct: list[int], total: list[int], sys_len: int, ref_len: int, cfg: BleuConfig
) -> float:
    """BLEU in [0, 100] from aggregated sufficient statistics."""
    max_n = cfg.max_ngram
    precisions = [0.0] * max_n
    effective = max_n
    for n in range(1, max_n + 1):
        if total[n - 1] == 0:
            break
        if cfg.effective_order:
            effective = n
        if correct[n - 1] == 0:
            if cfg.smoothing == "floor":
                precisions[n - 1] = 100.0 * cfg.smooth_value / total[n - 1]
        else:
            precisions[n - 1] = 100.0 * correct[n - 1] / total[n - 1]

    if sys_len == 0:
        return 0.0
    brevity = 1.0 if sys_len >= ref_len else math.exp(1 - ref_len / sys_len)
    head = precisions[:effective]
    if all(p == head[0] for p in head):
        # geometric mean of equal values is that value; avoids exp/log round-off
        geo_mean = head[0]
    else:
        geo_mean = math.exp(sum(_my_log(p) for p in head) / effective)
    return brevity * geo_mean


def corpus_bleu(hypotheses: list[str], references: list[str], cfg: BleuConfig = BLEU_DEFAULT) -> float:
    if len(hypotheses) != len(references):
        raise ValueError(f"{len(hypotheses)} hypotheses vs {len(references)} references")
    if not hypotheses:
        raise ValueError("need at least one segment")
    sys_len = ref_len = 0
    correct = [0] * cfg.max_ngram
    total = [0] * cfg.max_ngram
    for hyp, ref in zip(hypotheses, references):
        h_len, r_len, seg_correct, seg_total = _segment_stats(hyp, ref, cfg.max_ngram)
        sys_len += h_len
        ref_len += r_len
        for i in range(cfg.max_ngram):
            correct[i] += seg_correct[i]
            total[i] += seg_total[i]
    return compute_bleu(correct, total, sys_len, ref_len, cfg)


def sentence_bleu(hypothesis: str, reference: str, cfg: BleuConfig = BLEU_RELAXED) -> float:
    """Segment-level BLEU; callers should prefer the relaxed preset here."""
    return corpus_bleu([hypothesis], [reference], cfg)
