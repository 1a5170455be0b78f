"""Parameter grids, the diagnostic subset, and the two-stage grid search."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from udicl.deps import DUPLICATE_MODES, TIERS, DepParams
from udicl.lexicon import LexParams
from udicl.runner.run import TranslationRecord


def dep_grid() -> list[DepParams]:
    """Every dependency-verbalizer configuration: 2 x 2 x 3 = 12 points."""
    grid = []
    for mode in DUPLICATE_MODES:
        for collapse in (False, True):
            for tier in TIERS:
                grid.append(DepParams(duplicate_mode=mode, collapse_relations=collapse, pos_tier=tier))
    return grid


def lex_grid() -> list[LexParams]:
    """Dictionary-parameter lattice searched for the lexicon section."""
    grid = []
    for max_entries in (25, 50, 100):
        for max_senses in (3, 5, 10):
            for dedup in (False, True):
                grid.append(
                    LexParams(
                        max_entries_per_sentence=max_entries,
                        max_senses_per_entry=max_senses,
                        dedup_ddglc=dedup,
                    )
                )
    return grid


def select_diagnostic_subset(baseline_records: Sequence[TranslationRecord], k: int = 10) -> list[str]:
    """The k easiest plus k hardest sentence ids by baseline BERTScore F1.

    Ties break by ascending sentence id; the easiest block comes first.
    """
    scored = []
    for record in baseline_records:
        f1 = record.scores.get("bertscore_f1")
        if f1 is None:
            raise ValueError(f"record {record.sentence_id} lacks a bertscore_f1 score")
        scored.append((record.sentence_id, f1))
    if len(scored) < 2 * k:
        raise ValueError(f"need at least {2 * k} scored sentences, got {len(scored)}")
    easiest = sorted(scored, key=lambda item: (-item[1], item[0]))[:k]
    hardest = sorted(scored, key=lambda item: (item[1], item[0]))[:k]
    return [sid for sid, _ in easiest] + [sid for sid, _ in hardest]


@dataclass
class GridSearchResult:
    ranked: list[tuple[object, float]]        # every grid point with its subset score
    shortlist: list[object]                   # top configurations by subset score
    final: object                             # shortlist winner on the full split
    final_score: float


def grid_search(
    component: str,
    grid: Sequence[object],
    subset_ids: Sequence[str],
    evaluate: Callable[[object, Sequence[str] | None], float],
    shortlist_size: int = 4,
) -> GridSearchResult:
    """Rank every grid point on the diagnostic subset, then decide the
    shortlist on the full split.

    `evaluate(config, sentence_ids)` returns mean BERTScore F1 over the given
    ids, or over the whole split when ids is None.
    """
    if component not in ("LEX", "DEP"):
        raise ValueError(f"unknown component {component!r}")
    if not grid:
        raise ValueError("empty parameter grid")

    ranked = []
    for index, config in enumerate(grid):
        score = evaluate(config, list(subset_ids))
        ranked.append((index, config, score))
    ranked.sort(key=lambda item: (-item[2], item[0]))

    shortlist = [config for _, config, _ in ranked[:shortlist_size]]
    best_config = None
    best_score = float("-inf")
    for config in shortlist:
        score = evaluate(config, None)
        if score > best_score:
            best_config, best_score = config, score
    return GridSearchResult(
        ranked=[(config, score) for _, config, score in ranked],
        shortlist=shortlist,
        final=best_config,
        final_score=best_score,
    )
