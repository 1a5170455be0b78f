"""Bilingual dictionary index and the dictionary section of the prompt.

Entries are ingested from a normalized TSV (or a TEI subset), retrieved per
token by lemma with a surface-form fallback, capped, and verbalized as plain
text.  Lookup order is stable: ingestion order, entries whose POS matches the
token's tag first.
"""
from __future__ import annotations

import csv
import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from typing import Iterable, TextIO

from udicl.conllu import Sentence, Token
from udicl.prompts import LEX, SectionText

TSV_COLUMNS = ["entry_id", "headword", "lemma_keys", "pos", "dialect", "source", "language", "gloss"]

# senses tagged for another dialect are dropped; untagged senses are kept
KEPT_DIALECTS = {"", "S", "Sahidic"}

DDGLC_SOURCE = "DDGLC"

LANGUAGE_NAMES = {
    "en": "English",
    "de": "German",
    "fr": "French",
    "cop": "Coptic",
    "grc": "Greek",
    "la": "Latin",
    "ar": "Arabic",
}

POS_DISPLAY = {
    "VERB": "Verb",
    "NOUN": "Noun",
    "PROPN": "Proper noun",
    "ADP": "Preposition",
    "ADV": "Adverb",
    "ADJ": "Adjective",
    "DET": "Determiner",
    "PRON": "Pronoun",
    "AUX": "Auxiliary",
    "NUM": "Numeral",
    "CCONJ": "Conjunction",
    "SCONJ": "Conjunction",
    "PART": "Particle",
    "INTJ": "Interjection",
    "V": "Verb",
    "N": "Noun",
    "PREP": "Preposition",
    "ART": "Article",
    "NPROP": "Proper noun",
    "CONJ": "Conjunction",
}


class LexiconFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Sense:
    translations: tuple[tuple[str, str], ...]  # (language code, gloss string)
    dialect: str = ""
    source: str = ""

    def gloss_key(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(self.translations))


@dataclass(frozen=True)
class LexEntry:
    entry_id: str
    headword: str
    lemma_keys: tuple[str, ...]
    pos: str
    senses: tuple[Sense, ...]


class LexiconIndex:
    """Immutable after ingest; lookups return entries in ingestion order."""

    def __init__(self, entries: Iterable[LexEntry]):
        self.entries: tuple[LexEntry, ...] = tuple(entries)
        self.entries_by_lemma: dict[str, list[LexEntry]] = {}
        self.entries_by_form: dict[str, list[LexEntry]] = {}
        seen_ids = set()
        for entry in self.entries:
            if entry.entry_id in seen_ids:
                raise LexiconFormatError(f"duplicate entry_id {entry.entry_id!r}")
            seen_ids.add(entry.entry_id)
            if not entry.senses:
                raise LexiconFormatError(f"entry {entry.entry_id!r} has no senses")
            for key in entry.lemma_keys:
                self.entries_by_lemma.setdefault(key, []).append(entry)
            self.entries_by_form.setdefault(entry.headword, []).append(entry)

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class LexParams:
    target_languages: tuple[str, ...] = ("en",)
    max_entries_per_sentence: int = 100
    max_senses_per_entry: int = 10
    dedup_ddglc: bool = False

    def __post_init__(self):
        if self.max_entries_per_sentence < 1 or self.max_senses_per_entry < 1:
            raise ValueError("entry and sense caps must be >= 1")


# the paper's fixed dictionary setting: English only, 100 entries, 10 senses, no dedup
DEFAULT_LEX_PARAMS = LexParams()


def _rows_to_entries(rows: list[dict[str, str]]) -> list[LexEntry]:
    # rows of one entry must be contiguous; a reappearing id is a duplicate
    entries: list[LexEntry] = []
    groups: list[tuple[str, list[dict[str, str]]]] = []
    seen: set[str] = set()
    for row in rows:
        eid = row["entry_id"]
        if groups and groups[-1][0] == eid:
            groups[-1][1].append(row)
            continue
        if eid in seen:
            raise LexiconFormatError(f"duplicate entry_id {eid!r}")
        seen.add(eid)
        groups.append((eid, [row]))

    for eid, group in groups:
        head = group[0]
        senses: list[Sense] = []
        sense_rows: dict[str, list[dict[str, str]]] = {}
        sense_order: list[str] = []
        for i, row in enumerate(group):
            key = row.get("sense_no", "") or f"__row{i}"
            if key not in sense_rows:
                sense_rows[key] = []
                sense_order.append(key)
            sense_rows[key].append(row)
        for key in sense_order:
            batch = sense_rows[key]
            senses.append(
                Sense(
                    translations=tuple((r["language"], r["gloss"]) for r in batch),
                    dialect=batch[0].get("dialect", ""),
                    source=batch[0].get("source", ""),
                )
            )
        lemma_keys = tuple(k for k in head["lemma_keys"].split("|") if k)
        entries.append(
            LexEntry(
                entry_id=eid,
                headword=head["headword"],
                lemma_keys=lemma_keys or (head["headword"],),
                pos=head.get("pos", ""),
                senses=tuple(senses),
            )
        )
    return entries


def _ingest_tsv(stream: TextIO) -> LexiconIndex:
    reader = csv.reader(stream, delimiter="\t", quoting=csv.QUOTE_NONE)
    try:
        header = next(reader)
    except StopIteration:
        return LexiconIndex(())
    missing = [c for c in TSV_COLUMNS if c not in header]
    if missing:
        raise LexiconFormatError(f"missing TSV columns: {', '.join(missing)}")
    rows = []
    for record_no, cols in enumerate(reader, start=2):
        if not cols or (len(cols) == 1 and not cols[0].strip()):
            continue
        if len(cols) != len(header):
            raise LexiconFormatError(f"record {record_no}: expected {len(header)} fields, got {len(cols)}")
        rows.append(dict(zip(header, cols)))
    return LexiconIndex(_rows_to_entries(rows))


_TEI_NS = "{http://www.tei-c.org/ns/1.0}"


def _tei_tag(elem: ET.Element) -> str:
    return elem.tag.replace(_TEI_NS, "")


def _ingest_tei(stream: TextIO) -> LexiconIndex:
    """Read the entry/form/sense/cit subset of a TEI dictionary."""
    try:
        tree = ET.parse(stream)
    except ET.ParseError as exc:
        raise LexiconFormatError(f"TEI parse error: {exc}") from exc
    rows: list[dict[str, str]] = []
    auto_id = 0
    for entry in tree.getroot().iter():
        if _tei_tag(entry) != "entry":
            continue
        auto_id += 1
        entry_id = entry.get("{http://www.w3.org/XML/1998/namespace}id") or entry.get("id") or f"tei-{auto_id}"
        orths = [e.text or "" for e in entry.iter() if _tei_tag(e) == "orth"]
        headword = orths[0] if orths else ""
        pos_elems = [e.text or "" for e in entry.iter() if _tei_tag(e) == "pos"]
        pos = pos_elems[0] if pos_elems else ""
        sense_no = 0
        for sense in entry.iter():
            if _tei_tag(sense) != "sense":
                continue
            sense_no += 1
            usg = [e.text or "" for e in sense.iter() if _tei_tag(e) == "usg"]
            dialect = usg[0] if usg else ""
            for cit in sense.iter():
                if _tei_tag(cit) != "cit" or cit.get("type") not in (None, "translation"):
                    continue
                lang = cit.get("{http://www.w3.org/XML/1998/namespace}lang") or cit.get("lang") or ""
                quotes = [e.text or "" for e in cit.iter() if _tei_tag(e) == "quote"]
                for quote in quotes:
                    rows.append(
                        {
                            "entry_id": entry_id,
                            "headword": headword,
                            "lemma_keys": headword,
                            "pos": pos,
                            "dialect": dialect,
                            "source": "",
                            "language": lang,
                            "gloss": quote,
                            "sense_no": str(sense_no),
                        }
                    )
    return LexiconIndex(_rows_to_entries(rows))


def ingest(stream: TextIO | str, format: str = "normalized-tsv") -> LexiconIndex:
    """Build an index from a dictionary stream; `format` is normalized-tsv or tei-xml-subset."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    if format == "normalized-tsv":
        return _ingest_tsv(stream)
    if format == "tei-xml-subset":
        return _ingest_tei(stream)
    raise LexiconFormatError(f"unknown dictionary format {format!r}")


def _rank(entries: list[LexEntry], upos: str) -> list[LexEntry]:
    matching = [e for e in entries if e.pos == upos]
    rest = [e for e in entries if e.pos != upos]
    return matching + rest


def lookup(sentence: Sentence, index: LexiconIndex) -> list[tuple[Token, list[LexEntry]]]:
    """Retrieve entries per token: lemma match first, surface-form fallback.

    Entries whose POS equals the token's upos rank first; within each group
    ingestion order is preserved.  Tokens with no hits are omitted.
    """
    hits: list[tuple[Token, list[LexEntry]]] = []
    for token in sentence.tokens:
        entries = index.entries_by_lemma.get(token.lemma, [])
        if not entries:
            entries = index.entries_by_form.get(token.form, [])
        if entries:
            hits.append((token, _rank(list(entries), token.upos)))
    return hits


def _filter_senses(entry: LexEntry, params: LexParams) -> LexEntry:
    senses = []
    for sense in entry.senses:
        if sense.dialect not in KEPT_DIALECTS:
            continue
        translations = tuple(t for t in sense.translations if t[0] in params.target_languages)
        if translations:
            senses.append(replace(sense, translations=translations))
    if params.dedup_ddglc:
        deduped: list[Sense] = []
        seen: set[tuple] = set()
        for sense in senses:
            if sense.source == DDGLC_SOURCE:
                key = sense.gloss_key()
                if key in seen:
                    continue
                seen.add(key)
            deduped.append(sense)
        senses = deduped
    return replace(entry, senses=tuple(senses[: params.max_senses_per_entry]))


def filter_entries(
    hits: list[tuple[Token, list[LexEntry]]], params: LexParams
) -> list[tuple[Token, list[LexEntry]]]:
    """Apply language, dialect, dedup and cap rules; caps count (token, entry) occurrences."""
    filtered: list[tuple[Token, list[LexEntry]]] = []
    budget = params.max_entries_per_sentence
    for token, entries in hits:
        kept: list[LexEntry] = []
        for entry in entries:
            if budget == 0:
                break
            pruned = _filter_senses(entry, params)
            if not pruned.senses:
                continue
            kept.append(pruned)
            budget -= 1
        if kept:
            filtered.append((token, kept))
        if budget == 0:
            break
    return filtered


def _language_list(params: LexParams) -> str:
    names = [LANGUAGE_NAMES.get(code, code) for code in params.target_languages]
    return "[" + ", ".join(f"'{n}'" for n in names) + "]"


def lexicon_header(params: LexParams) -> str:
    return (
        "For the translation task, you are given dictionary entries for Coptic. "
        "Some words can be polysemous and there might be multiple entries. "
        f"Each entry can contain multiple senses with translations in {_language_list(params)}. "
        "In such a case, please choose the most appropriate one. "
        "Note that for some words, they might be derived from a more basic form, "
        "some entries will be for such lemma.\n\n"
        "Here are the entries for collected for individual words in the sentence:"
    )


def _display_pos(pos: str) -> str:
    if not pos:
        return ""
    return POS_DISPLAY.get(pos, pos.capitalize())


def _entry_block(entry: LexEntry) -> str:
    pos = _display_pos(entry.pos)
    label = f"{pos} {entry.headword}" if pos else entry.headword
    lines = [f"Dictionary entry {label} has {len(entry.senses)} senses."]
    for number, sense in enumerate(entry.senses, start=1):
        lines.append(f"Sense {number}:")
        by_language: dict[str, list[str]] = {}
        for code, gloss in sense.translations:
            by_language.setdefault(code, []).append(gloss)
        for code, glosses in by_language.items():
            name = LANGUAGE_NAMES.get(code, code)
            lines.append(f"- In {name}, {entry.headword} means {', '.join(glosses)}")
    return "\n".join(lines)


def verbalize_lexicon(hits: list[tuple[Token, list[LexEntry]]], params: LexParams) -> SectionText:
    """Render filtered hits as the dictionary section; pure function of its inputs."""
    blocks = [_entry_block(entry) for _, entries in hits for entry in entries]
    body = "\n\n".join(blocks) if blocks else "no entries found"
    return SectionText(kind=LEX, header=lexicon_header(params), body=body)
