"""Report tables over persisted run records.

Every number is recomputed from the per-sentence record payloads, so deltas
can always be traced back to raw completions.  Missing cells stay missing
rather than becoming zeros.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Sequence

from udicl.metrics import (
    BLEU_DEFAULT,
    BLEU_RELAXED,
    bleu_signature,
    chrf,
    chrf_signature,
    corpus_bleu,
    meteor_lite,
)
from udicl.prompts import SETTING_NAMES
from udicl.runner.corpus import Corpus
from udicl.runner.run import TranslationRecord


def bleu_preset_for_split(split: str):
    """The default preset zeroes out on the test split, so that split is relaxed."""
    return BLEU_RELAXED if split == "test" else BLEU_DEFAULT


def _score_cell(records: Sequence[TranslationRecord], corpus: Corpus) -> dict:
    hyps = [r.completion for r in records]
    refs = [corpus.references[r.sentence_id] for r in records]
    f1s = [r.scores.get("bertscore_f1") for r in records]
    cell = {
        "n": len(records),
        "bleu": corpus_bleu(hyps, refs, bleu_preset_for_split(corpus.split)),
        "chrf": chrf(hyps, refs),
        "meteor_lite": meteor_lite(hyps, refs),
        "bertscore_f1": (sum(f1s) / len(f1s)) if all(v is not None for v in f1s) else None,
    }
    return cell


def _delta(cell: dict | None, base: dict | None, metric: str) -> float | None:
    if cell is None or base is None:
        return None
    if cell.get(metric) is None or base.get(metric) is None:
        return None
    return cell[metric] - base[metric]


def _group(records: Iterable[TranslationRecord]):
    grouped: dict[tuple[str, str, str], list[TranslationRecord]] = defaultdict(list)
    for record in records:
        grouped[(record.model, record.setting, record.parse_source)].append(record)
    return grouped


def build_report(records: Sequence[TranslationRecord], corpus: Corpus) -> dict:
    grouped = _group(records)
    models = sorted({model for model, _, _ in grouped})

    overall: dict[str, dict] = {}
    for model in models:
        per_setting: dict[str, dict] = {}
        base = None
        for setting in SETTING_NAMES:
            recs = grouped.get((model, setting, "automatic"))
            if not recs:
                continue
            cell = _score_cell(recs, corpus)
            per_setting[setting] = cell
            if setting == "baseline":
                base = cell
        for setting, cell in per_setting.items():
            cell["delta_bleu"] = _delta(cell, base, "bleu")
            cell["delta_bertscore_f1"] = _delta(cell, base, "bertscore_f1")
        overall[model] = per_setting

    # change relative to the dictionary-only setting, for settings that add to it
    lex_ablation: dict[str, dict] = {}
    for model in models:
        lex_cell = overall.get(model, {}).get("LEX")
        rows = {}
        for setting in SETTING_NAMES:
            cell = overall.get(model, {}).get(setting)
            if cell is None or setting in ("baseline", "LEX"):
                continue
            rows[setting] = {
                "delta_bertscore_f1": _delta(cell, lex_cell, "bertscore_f1"),
                "delta_bleu": _delta(cell, lex_cell, "bleu"),
            }
        if lex_cell is not None:
            lex_ablation[model] = {"LEX": lex_cell, "deltas": rows}

    bible_split: dict[str, dict] = {}
    if corpus.bible_flag:
        for model in models:
            per_setting = {}
            for setting in SETTING_NAMES:
                recs = grouped.get((model, setting, "automatic"))
                if not recs:
                    continue
                bible = [r for r in recs if corpus.bible_flag.get(r.sentence_id)]
                other = [r for r in recs if not corpus.bible_flag.get(r.sentence_id)]
                row = {}
                if bible:
                    row["bible"] = _score_cell(bible, corpus)
                if other:
                    row["other"] = _score_cell(other, corpus)
                if row:
                    per_setting[setting] = row
            if per_setting:
                bible_split[model] = per_setting

    gold_auto: dict[str, dict] = {}
    for model in models:
        per_setting = {}
        for setting in SETTING_NAMES:
            row = {}
            for source in ("automatic", "gold"):
                recs = grouped.get((model, setting, source))
                if recs:
                    row[source] = _score_cell(recs, corpus)
            if "gold" in row:
                per_setting[setting] = row
        if per_setting:
            gold_auto[model] = per_setting

    n = max((cell["n"] for per in overall.values() for cell in per.values()), default=0)
    return {
        "split": corpus.split,
        "overall": overall,
        "lex_ablation": lex_ablation,
        "bible_split": bible_split,
        "gold_auto": gold_auto,
        "signatures": {
            "bleu": bleu_signature(bleu_preset_for_split(corpus.split), n),
            "chrf": chrf_signature(n),
            "meteor": "meteor_lite|exact+stem|no-synonyms",
        },
    }


def _fmt(value, width=9, decimals=4) -> str:
    if value is None:
        return "-".rjust(width)
    return f"{value:.{decimals}f}".rjust(width)


def render_report(report: dict) -> str:
    lines: list[str] = []
    lines.append(f"split: {report['split']}")
    for name, signature in report["signatures"].items():
        lines.append(f"signature[{name}]: {signature}")

    lines.append("")
    lines.append("== overall (automatic parses) ==")
    for model, per_setting in report["overall"].items():
        lines.append(f"model: {model}")
        lines.append(
            "  setting".ljust(12)
            + "BLEU".rjust(9) + "dBLEU".rjust(9)
            + "BertF1".rjust(9) + "dF1".rjust(9)
            + "chrF++".rjust(9) + "meteorL".rjust(9)
        )
        for setting in SETTING_NAMES:
            cell = per_setting.get(setting)
            if cell is None:
                continue
            lines.append(
                f"  {setting}".ljust(12)
                + _fmt(cell["bleu"], decimals=2)
                + _fmt(cell["delta_bleu"], decimals=2)
                + _fmt(cell["bertscore_f1"])
                + _fmt(cell["delta_bertscore_f1"])
                + _fmt(cell["chrf"], decimals=2)
                + _fmt(cell["meteor_lite"])
            )

    if report["lex_ablation"]:
        lines.append("")
        lines.append("== change from the dictionary-only setting ==")
        for model, data in report["lex_ablation"].items():
            lines.append(f"model: {model}  (LEX BertF1 {_fmt(data['LEX']['bertscore_f1']).strip()})")
            for setting, row in data["deltas"].items():
                lines.append(
                    f"  +{setting}".ljust(12)
                    + _fmt(row["delta_bertscore_f1"])
                    + _fmt(row["delta_bleu"], decimals=2)
                )

    if report["bible_split"]:
        lines.append("")
        lines.append("== Bible vs other ==")
        for model, per_setting in report["bible_split"].items():
            lines.append(f"model: {model}")
            for setting, row in per_setting.items():
                bible = row.get("bible", {}).get("bertscore_f1")
                other = row.get("other", {}).get("bertscore_f1")
                lines.append(f"  {setting}".ljust(12) + _fmt(bible) + _fmt(other))

    if report["gold_auto"]:
        lines.append("")
        lines.append("== automatic vs gold parses ==")
        for model, per_setting in report["gold_auto"].items():
            lines.append(f"model: {model}")
            for setting, row in per_setting.items():
                auto = row.get("automatic", {}).get("bertscore_f1")
                gold = row.get("gold", {}).get("bertscore_f1")
                lines.append(f"  {setting}".ljust(12) + _fmt(auto) + _fmt(gold))

    return "\n".join(lines) + "\n"
