"""Corpus loading: parsed sentences plus their references and Bible flags."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from udicl.conllu import Document, parse_document

SPLITS = ("dev", "test", "ostraca")


class CorpusError(ValueError):
    pass


@dataclass
class Corpus:
    split: str
    auto: Document
    gold: Document | None
    references: dict[str, str]
    bible_flag: dict[str, bool]

    def document(self, parse_source: str) -> Document:
        if parse_source == "automatic":
            return self.auto
        if parse_source == "gold":
            if self.gold is None:
                raise CorpusError(f"split {self.split!r} has no gold parses")
            return self.gold
        raise CorpusError(f"unknown parse source {parse_source!r}")


def load_references(path: str | Path) -> tuple[dict[str, str], dict[str, bool]]:
    """Read the references TSV: sent_id, english_reference, bible_flag."""
    references: dict[str, str] = {}
    bible: dict[str, bool] = {}
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(text.splitlines(), delimiter="\t", quoting=csv.QUOTE_NONE)
    header = next(reader, None)
    if header is None or header[:2] != ["sent_id", "english_reference"]:
        raise CorpusError(f"{path}: expected header sent_id\tenglish_reference[\tbible_flag]")
    for row_no, cols in enumerate(reader, start=2):
        if not cols or (len(cols) == 1 and not cols[0].strip()):
            continue
        if len(cols) < 2:
            raise CorpusError(f"{path}:{row_no}: expected at least 2 fields")
        sid = cols[0]
        if sid in references:
            raise CorpusError(f"{path}:{row_no}: duplicate reference for {sid!r}")
        references[sid] = cols[1]
        bible[sid] = len(cols) > 2 and cols[2] in ("1", "true", "True")
    return references, bible


def subset_corpus(corpus: Corpus, sentence_ids) -> Corpus:
    """A view of the corpus restricted to the given sentence ids (order kept)."""
    wanted = set(sentence_ids)
    missing = wanted - {s.source_id for s in corpus.auto.sentences}
    if missing:
        raise CorpusError(f"unknown sentence ids: {', '.join(sorted(missing)[:5])}")

    def pick(doc: Document | None) -> Document | None:
        if doc is None:
            return None
        kept = tuple(s for s in doc.sentences if s.source_id in wanted)
        return Document(sentences=kept, origin=doc.origin, parse_source=doc.parse_source)

    return Corpus(
        split=corpus.split,
        auto=pick(corpus.auto),
        gold=pick(corpus.gold),
        references=corpus.references,
        bible_flag=corpus.bible_flag,
    )


def load_corpus(
    split: str,
    conllu_path: str | Path,
    references_path: str | Path,
    gold_conllu_path: str | Path | None = None,
) -> Corpus:
    auto = parse_document(
        Path(conllu_path).read_text(encoding="utf-8"), origin=str(conllu_path), parse_source="automatic"
    )
    gold = None
    if gold_conllu_path:
        gold = parse_document(
            Path(gold_conllu_path).read_text(encoding="utf-8"),
            origin=str(gold_conllu_path),
            parse_source="gold",
        )
        auto_ids = [s.source_id for s in auto.sentences]
        gold_ids = [s.source_id for s in gold.sentences]
        if auto_ids != gold_ids:
            raise CorpusError("gold and automatic parses cover different sentences")
    references, bible = load_references(references_path)
    missing = [s.source_id for s in auto.sentences if s.source_id not in references]
    if missing:
        raise CorpusError(f"sentences missing references: {', '.join(missing[:5])}")
    return Corpus(split=split, auto=auto, gold=gold, references=references, bible_flag=bible)
