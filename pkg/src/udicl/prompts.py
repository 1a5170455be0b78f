"""Prompt assembly: compose the translation instruction for an experimental setting.

A prompt is the base instruction, followed by the section blocks the setting
includes (dictionary, raw parse, dependencies, constructions — always in that
order), closed by the consistency cue.  Output is byte-deterministic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources

from udicl.conllu import Sentence, serialize_sentence

LEX = "LEX"
CONLL = "CONLL"
DEP = "DEP"
CON = "CON"

SECTION_ORDER = (LEX, CONLL, DEP, CON)

CONLL_HEADER = "The raw conllu data for the sentence is in the CONLL-U format:"
DEP_HEADER = "The dependency information for the sentence is:"
CON_HEADER = "The information about specific constructions in the sentence is:"


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class SectionText:
    kind: str
    header: str
    body: str


@dataclass(frozen=True)
class Setting:
    name: str
    included_kinds: frozenset[str]


SETTINGS: dict[str, Setting] = {
    "baseline": Setting("baseline", frozenset()),
    "LEX": Setting("LEX", frozenset({LEX})),
    "CONLL": Setting("CONLL", frozenset({CONLL})),
    "CON": Setting("CON", frozenset({CON})),
    "DEP": Setting("DEP", frozenset({DEP})),
    "DEP+CON": Setting("DEP+CON", frozenset({DEP, CON})),
    "ALL": Setting("ALL", frozenset({LEX, CONLL, DEP, CON})),
}

SETTING_NAMES = tuple(SETTINGS)


@dataclass(frozen=True)
class Prompt:
    text: str
    setting: Setting
    source_sentence: str
    token_estimate: int


def load_template(name: str) -> str:
    """Read a bundled template file; templates carry one {source} placeholder."""
    text = resources.files("udicl.data").joinpath(name).read_text(encoding="utf-8").rstrip("\n")
    if text.count("{source}") != 1:
        raise AssemblyError(f"template {name!r} must contain exactly one {{source}} placeholder")
    return text


def default_base_template() -> str:
    return load_template("base_instruction.txt")


def default_closing_template() -> str:
    return load_template("closing_cue.txt")


def conllu_section(sentence: Sentence, include_comments: bool = False) -> SectionText:
    """The raw-parse section: the sentence's canonical rows, comments excluded by default."""
    block = serialize_sentence(sentence)
    if not include_comments:
        rows = [ln for ln in block.split("\n") if not ln.startswith("#")]
        block = "\n".join(rows)
    return SectionText(kind=CONLL, header=CONLL_HEADER, body=block)


def assemble(
    source: str,
    sections: list[SectionText],
    setting: Setting,
    base_template: str | None = None,
    closing_template: str | None = None,
) -> Prompt:
    """Compose the final prompt for one sentence under one setting.

    Section list order does not matter; blocks are emitted in SECTION_ORDER.
    Sections with an empty body are dropped together with their headers.
    """
    base = base_template if base_template is not None else default_base_template()
    closing = closing_template if closing_template is not None else default_closing_template()

    by_kind: dict[str, SectionText] = {}
    for section in sections:
        if section.kind not in setting.included_kinds:
            raise AssemblyError(f"section {section.kind} not allowed by setting {setting.name}")
        if section.kind in by_kind:
            raise AssemblyError(f"duplicate section {section.kind}")
        by_kind[section.kind] = section

    blocks = [base.format(source=source)]
    for kind in SECTION_ORDER:
        section = by_kind.get(kind)
        if section is not None and section.body:
            blocks.append(f"{section.header}\n{section.body}")
    if setting.name != "baseline":
        blocks.append(closing.format(source=source))

    text = "\n\n".join(blocks)
    return Prompt(
        text=text,
        setting=setting,
        source_sentence=source,
        token_estimate=math.ceil(len(text.encode("utf-8")) / 4),
    )
