"""Paired bootstrap significance test over per-sentence score vectors."""
from __future__ import annotations

import numpy as np


def paired_bootstrap(
    per_sentence_a: list[float] | np.ndarray,
    per_sentence_b: list[float] | np.ndarray,
    resamples: int = 10000,
    seed: int = 42,
) -> float:
    """Two-sided bootstrap p-value for the mean paired difference being zero.

    The difference vector is sorted before resampling, so the result depends
    only on the multiset of paired differences (pair order is irrelevant) and
    on the seed.
    """
    a = np.asarray(per_sentence_a, dtype=np.float64)
    b = np.asarray(per_sentence_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"paired score vectors must have equal length, got {a.shape} and {b.shape}")
    if a.size == 0:
        raise ValueError("need at least one paired score")

    diffs = np.sort(a - b)
    observed = diffs.mean()
    centered = diffs - diffs.mean()  # null: zero mean difference
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, diffs.size, size=(resamples, diffs.size))
    null_means = centered[idx].mean(axis=1)
    extreme = int(np.count_nonzero(np.abs(null_means) >= abs(observed)))
    return (1 + extreme) / (1 + resamples)
