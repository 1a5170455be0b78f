"""Sentence-to-prompt pipeline: bundle the loaded resources, build the
sections a setting asks for, and assemble the final prompt."""
from __future__ import annotations

from dataclasses import dataclass, field

from udicl import constructions, deps, lexicon, prompts
from udicl.conllu import Sentence
from udicl.prompts import CON, CONLL, DEP, LEX, Prompt, SectionText, Setting


@dataclass
class Resources:
    lexicon_index: lexicon.LexiconIndex
    lex_params: lexicon.LexParams = field(default_factory=lambda: lexicon.DEFAULT_LEX_PARAMS)
    dep_params: deps.DepParams = field(default_factory=lambda: deps.DEFAULT_DEP_PARAMS)
    gloss_table: deps.RelationGlossTable = field(default_factory=deps.load_gloss_table)
    ruleset: constructions.RuleSet = field(default_factory=constructions.load_starter_rules)
    translit: constructions.TransliterationTable = field(default_factory=constructions.load_translit_table)
    base_template: str = field(default_factory=prompts.default_base_template)
    closing_template: str = field(default_factory=prompts.default_closing_template)
    include_conllu_comments: bool = False


def build_sections(
    sentence: Sentence, setting: Setting, res: Resources, warnings: list[str] | None = None
) -> list[SectionText]:
    sections: list[SectionText] = []
    if LEX in setting.included_kinds:
        hits = lexicon.filter_entries(lexicon.lookup(sentence, res.lexicon_index), res.lex_params)
        sections.append(lexicon.verbalize_lexicon(hits, res.lex_params))
    if CONLL in setting.included_kinds:
        sections.append(prompts.conllu_section(sentence, res.include_conllu_comments))
    if DEP in setting.included_kinds:
        sections.append(deps.verbalize_dependencies(sentence, res.dep_params, res.gloss_table))
    if CON in setting.included_kinds:
        sections.append(
            constructions.verbalize_constructions(sentence, res.ruleset, res.translit, warnings)
        )
    return sections


def build_prompt(
    sentence: Sentence,
    setting: Setting,
    res: Resources,
    source: str | None = None,
    warnings: list[str] | None = None,
) -> Prompt:
    sections = build_sections(sentence, setting, res, warnings)
    return prompts.assemble(
        source if source is not None else sentence.source_text(),
        sections,
        setting,
        res.base_template,
        res.closing_template,
    )
