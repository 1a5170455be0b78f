"""Experiment orchestration: corpora, runs, grid searches and report tables."""

from udicl.runner.corpus import Corpus, load_corpus, load_references
from udicl.runner.run import RunSpec, TranslationRecord, run, write_records, read_records
from udicl.runner.gridsearch import (
    GridSearchResult,
    dep_grid,
    grid_search,
    lex_grid,
    select_diagnostic_subset,
)

__all__ = [
    "Corpus", "load_corpus", "load_references", "RunSpec", "TranslationRecord",
    "run", "write_records", "read_records", "GridSearchResult", "dep_grid",
    "grid_search", "lex_grid", "select_diagnostic_subset",
]
