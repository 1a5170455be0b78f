"""Corpus- and sentence-level MT metrics with auditable configurations."""
from __future__ import annotations

from dataclasses import dataclass, field

from udicl.metrics.bleu import (
    BLEU_DEFAULT,
    BLEU_RELAXED,
    BleuConfig,
    bleu_signature,
    corpus_bleu,
    sentence_bleu,
)
from udicl.metrics.bootstrap import paired_bootstrap
from udicl.metrics.bertscore import ScoreCache, SidecarClient, SidecarError, bertscore, score_key
from udicl.metrics.chrf import chrf, chrf_signature, sentence_chrf
from udicl.metrics.meteor import meteor_lite, sentence_meteor
from udicl.metrics.tokenizer import tokenize_13a

__all__ = [
    "BLEU_DEFAULT", "BLEU_RELAXED", "BleuConfig", "bleu_signature", "corpus_bleu",
    "sentence_bleu", "paired_bootstrap", "ScoreCache", "SidecarClient", "SidecarError",
    "bertscore", "score_key", "chrf", "chrf_signature", "sentence_chrf", "meteor_lite",
    "sentence_meteor", "tokenize_13a", "ScoreReport", "score_corpus",
]


@dataclass
class ScoreReport:
    """One evaluated (hypotheses, references) corpus with audit signatures."""

    n_segments: int
    bleu: float
    chrf: float
    meteor_lite: float
    bertscore_f1_mean: float | None
    bertscore_f1: list[float] | None
    sentence_bleu_relaxed: list[float] = field(default_factory=list)
    signatures: dict[str, str] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n_segments": self.n_segments,
            "bleu": self.bleu,
            "chrf": self.chrf,
            "meteor_lite": self.meteor_lite,
            "bertscore_f1_mean": self.bertscore_f1_mean,
            "signatures": self.signatures,
        }


def score_corpus(
    hypotheses: list[str],
    references: list[str],
    bleu_config: BleuConfig = BLEU_DEFAULT,
    bertscore_f1: list[float] | None = None,
) -> ScoreReport:
    n = len(hypotheses)
    mean_f1 = sum(bertscore_f1) / n if bertscore_f1 else None
    return ScoreReport(
        n_segments=n,
        bleu=corpus_bleu(hypotheses, references, bleu_config),
        chrf=chrf(hypotheses, references),
        meteor_lite=meteor_lite(hypotheses, references),
        bertscore_f1_mean=mean_f1,
        bertscore_f1=list(bertscore_f1) if bertscore_f1 else None,
        sentence_bleu_relaxed=[sentence_bleu(h, r) for h, r in zip(hypotheses, references)],
        signatures={
            "bleu": bleu_signature(bleu_config, n),
            "bleu_sentence": bleu_signature(BLEU_RELAXED, 1),
            "chrf": chrf_signature(n),
            "meteor": "meteor_lite|exact+stem|no-synonyms",
        },
    )
