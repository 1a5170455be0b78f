"""Execute one (split, setting, model, parse source) run and persist records."""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from udicl.gateway import Gateway
from udicl.metrics import sentence_bleu, sentence_chrf, sentence_meteor
from udicl.metrics.bertscore import ScoreCache, SidecarClient, score_key
from udicl.pipeline import Resources, build_prompt
from udicl.prompts import SETTINGS
from udicl.runner.corpus import Corpus, CorpusError


@dataclass(frozen=True)
class RunSpec:
    split: str
    setting: str
    model: str
    parse_source: str = "automatic"
    context_budget: int | None = None

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise ValueError(f"unknown setting {self.setting!r}; choose from {tuple(SETTINGS)}")


@dataclass
class TranslationRecord:
    sentence_id: str
    setting: str
    model: str
    parse_source: str
    prompt_hash: str
    completion: str
    status: str
    scores: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def key(self) -> tuple[str, str, str, str]:
        return (self.sentence_id, self.setting, self.model, self.parse_source)

    def to_json(self) -> str:
        return json.dumps(
            {
                "sentence_id": self.sentence_id,
                "setting": self.setting,
                "model": self.model,
                "parse_source": self.parse_source,
                "prompt_hash": self.prompt_hash,
                "completion": self.completion,
                "status": self.status,
                "scores": self.scores,
                "warnings": self.warnings,
            },
            sort_keys=True,
            ensure_ascii=False,
        )

    @classmethod
    def from_json(cls, line: str) -> "TranslationRecord":
        data = json.loads(line)
        return cls(**data)


def run(
    spec: RunSpec,
    corpus: Corpus,
    resources: Resources,
    gateway: Gateway,
    sidecar: SidecarClient | None = None,
    bert_cache: ScoreCache | None = None,
    bert_model_id: str | None = None,
) -> list[TranslationRecord]:
    """Translate and score every sentence; records come back in corpus order."""
    if spec.split != corpus.split:
        raise CorpusError(f"spec is for split {spec.split!r} but corpus is {corpus.split!r}")
    document = corpus.document(spec.parse_source)  # validated before any network call
    setting = SETTINGS[spec.setting]

    prompts = []
    prompt_warnings: list[list[str]] = []
    for sentence in document.sentences:
        warnings: list[str] = []
        prompt = build_prompt(sentence, setting, resources, warnings=warnings)
        if spec.context_budget is not None and prompt.token_estimate > spec.context_budget:
            warnings.append("context_budget_exceeded")
        prompts.append(prompt)
        prompt_warnings.append(warnings)

    # completions may finish out of order; map() restores corpus order
    with ThreadPoolExecutor(max_workers=gateway.cfg.max_in_flight) as pool:
        completions = list(pool.map(gateway.translate, prompts))

    bert_f1: dict[int, float] = {}
    if sidecar is not None or (bert_cache is not None and bert_model_id is not None):
        model_id = sidecar.model_id if sidecar is not None else bert_model_id
        cache = bert_cache if bert_cache is not None else ScoreCache()
        pairs = [
            (completions[i].text, corpus.references[s.source_id])
            for i, s in enumerate(document.sentences)
        ]
        missing = [
            i for i, (h, r) in enumerate(pairs) if cache.get(score_key(model_id, h, r)) is None
        ]
        if missing and sidecar is not None:
            scored = sidecar.score_batch([pairs[i] for i in missing])
            for i, (p, r, f1) in zip(missing, scored):
                cache.put(score_key(model_id, pairs[i][0], pairs[i][1]), p, r, f1)
        for i, (h, r) in enumerate(pairs):
            hit = cache.get(score_key(model_id, h, r))
            if hit is not None:
                bert_f1[i] = hit[2]

    records: list[TranslationRecord] = []
    for i, sentence in enumerate(document.sentences):
        completion = completions[i]
        reference = corpus.references[sentence.source_id]
        warnings = list(prompt_warnings[i])
        if completion.status == "empty" or not completion.text:
            warnings.append("empty_completion")
        scores = {
            "sentence_bleu_relaxed": sentence_bleu(completion.text, reference),
            "sentence_chrf": sentence_chrf(completion.text, reference),
            "sentence_meteor": sentence_meteor(completion.text, reference),
            "bertscore_f1": bert_f1.get(i),
        }
        records.append(
            TranslationRecord(
                sentence_id=sentence.source_id,
                setting=spec.setting,
                model=spec.model,
                parse_source=spec.parse_source,
                prompt_hash=hashlib.sha256(prompts[i].text.encode("utf-8")).hexdigest(),
                completion=completion.text,
                status=completion.status,
                scores=scores,
                warnings=warnings,
            )
        )
    return records


def write_records(records: list[TranslationRecord], path: str | Path, manifest: dict | None = None) -> None:
    """Append-only record file plus a sibling .manifest.json capturing config hashes."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as f:
        for record in records:
            f.write(record.to_json() + "\n")
    if manifest is not None:
        body = json.dumps(manifest, sort_keys=True, ensure_ascii=False, indent=2)
        manifest = dict(manifest)
        manifest["records_sha256"] = hashlib.sha256(path.read_bytes()).hexdigest()
        body = json.dumps(manifest, sort_keys=True, ensure_ascii=False, indent=2)
        Path(str(path) + ".manifest.json").write_text(body + "\n", encoding="utf-8")


def read_records(path: str | Path) -> list[TranslationRecord]:
    records = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(TranslationRecord.from_json(line))
    return records


def config_hash(payload: dict) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True, ensure_ascii=False).encode()).hexdigest()
