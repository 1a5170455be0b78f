"""Verbalized dependency relations: the plain-English syntax section of the prompt.

Every retained head-dependent pair becomes one English statement; repeated
surface forms are disambiguated with subscripts or ordinal phrases, relation
labels are glossed through a data table, and a POS tier controls how much of
the tree is verbalized.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from udicl.conllu import Sentence
from udicl.prompts import DEP, DEP_HEADER, SectionText

CONTENT_TIER = frozenset({"NOUN", "VERB", "PROPN", "ADP", "ADV"})
PARTICIPANTS_TIER = CONTENT_TIER | {"PRON", "AUX", "DET", "NUM"}
ALL_TIER = PARTICIPANTS_TIER | {"CCONJ", "SCONJ"}

TIERS = ("content", "participants", "all")
DUPLICATE_MODES = ("subscript", "nominalized")

_ORDINALS = [
    "first", "second", "third", "fourth", "fifth", "sixth", "seventh", "eighth",
    "ninth", "tenth", "eleventh", "twelfth", "thirteenth", "fourteenth", "fifteenth",
    "sixteenth", "seventeenth", "eighteenth", "nineteenth", "twentieth",
]


class UnknownRelationError(KeyError):
    def __init__(self, label: str):
        self.label = label
        super().__init__(f"no gloss for relation label {label!r}")


@dataclass(frozen=True)
class DepParams:
    duplicate_mode: str = "subscript"
    collapse_relations: bool = False
    pos_tier: str = "participants"

    def __post_init__(self):
        if self.duplicate_mode not in DUPLICATE_MODES:
            raise ValueError(f"duplicate_mode must be one of {DUPLICATE_MODES}")
        if self.pos_tier not in TIERS:
            raise ValueError(f"pos_tier must be one of {TIERS}")


# the shipped default is the fixed setting: subscripts, no collapse, participants tier
DEFAULT_DEP_PARAMS = DepParams()


@dataclass(frozen=True)
class RelationGlossTable:
    full: dict[str, str]
    collapsed: dict[str, str]


def load_gloss_table(path: str | Path | None = None) -> RelationGlossTable:
    """Load the deprel gloss TSV (deprel, full_gloss, collapsed_gloss)."""
    if path is None:
        text = resources.files("udicl.data").joinpath("relation_glosses.tsv").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    full: dict[str, str] = {}
    collapsed: dict[str, str] = {}
    reader = csv.reader(text.splitlines(), delimiter="\t", quoting=csv.QUOTE_NONE)
    header = next(reader)
    if header[:3] != ["deprel", "full_gloss", "collapsed_gloss"]:
        raise ValueError("gloss table must have columns: deprel, full_gloss, collapsed_gloss")
    for cols in reader:
        if len(cols) < 3:
            continue
        full[cols[0]] = cols[1]
        collapsed[cols[0]] = cols[2]
    return RelationGlossTable(full=full, collapsed=collapsed)


def relation_gloss(deprel: str, collapse: bool, table: RelationGlossTable) -> str:
    mapping = table.collapsed if collapse else table.full
    if deprel not in mapping:
        raise UnknownRelationError(deprel)
    return mapping[deprel]


def pos_tier_members(tier: str) -> frozenset[str]:
    if tier == "content":
        return CONTENT_TIER
    if tier == "participants":
        return frozenset(PARTICIPANTS_TIER)
    if tier == "all":
        return frozenset(ALL_TIER)
    raise ValueError(f"unknown tier {tier!r}")


def _ordinal(n: int) -> str:
    if n <= len(_ORDINALS):
        return _ORDINALS[n - 1]
    suffix = {1: "st", 2: "nd", 3: "rd"}.get(n % 10 if n % 100 not in (11, 12, 13) else 0, "th")
    return f"{n}{suffix}"


def assign_occurrence_labels(sentence: Sentence, mode: str = "subscript") -> dict[int, str]:
    """Display strings per token id; forms occurring more than once get indexed."""
    if mode not in DUPLICATE_MODES:
        raise ValueError(f"unknown duplicate mode {mode!r}")
    counts: dict[str, int] = {}
    for tok in sentence.tokens:
        counts[tok.form] = counts.get(tok.form, 0) + 1
    seen: dict[str, int] = {}
    labels: dict[int, str] = {}
    for tok in sentence.tokens:
        if counts[tok.form] == 1:
            labels[tok.id] = tok.form
            continue
        seen[tok.form] = seen.get(tok.form, 0) + 1
        k = seen[tok.form]
        if mode == "subscript":
            labels[tok.id] = f"{tok.form}_{k}"
        else:
            labels[tok.id] = f"the {_ordinal(k)} {tok.form}"
    return labels


def dependency_statements(sentence: Sentence, params: DepParams, table: RelationGlossTable) -> list[str]:
    """One statement per retained token; the root statement comes first."""
    tier = pos_tier_members(params.pos_tier)
    labels = assign_occurrence_labels(sentence, params.duplicate_mode)
    statements: list[str] = []
    root = sentence.root()
    statements.append(f"{labels[root.id]} is the root.")
    for tok in sentence.tokens:
        if tok.head == 0:
            continue
        head = sentence.token_by_id(tok.head)
        if tok.upos not in tier or head.upos not in tier:
            continue
        gloss = relation_gloss(tok.deprel, params.collapse_relations, table)
        statements.append(f"{labels[tok.id]} is the {gloss} of {labels[head.id]}.")
    return statements


def verbalize_dependencies(
    sentence: Sentence, params: DepParams | None = None, table: RelationGlossTable | None = None
) -> SectionText:
    params = params or DEFAULT_DEP_PARAMS
    table = table or load_gloss_table()
    body = " ".join(dependency_statements(sentence, params, table))
    return SectionText(kind=DEP, header=DEP_HEADER, body=body)
