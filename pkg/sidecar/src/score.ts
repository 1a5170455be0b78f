/**
 * BERTScore-style greedy matching over token embeddings.
 *
 * Precision: each hypothesis token takes its best cosine match among the
 * reference tokens; recall mirrors it from the reference side; F1 is their
 * harmonic mean.  Optional rescaling maps scores through a fixed baseline.
 */
import { CharNgramEmbedder, cosine } from "./embedder.js";

export interface ScoreResult {
  precision: number;
  recall: number;
  f1: number;
}

export function tokenize(text: string): string[] {
  return text
    .toLowerCase()
    .split(/\s+/)
    .map((t) => t.replace(/^[^\p{L}\p{N}]+|[^\p{L}\p{N}]+$/gu, ""))
    .filter((t) => t.length > 0);
}

export class BertScorer {
  private readonly embedder: CharNgramEmbedder;
  private readonly rescale: boolean;
  private readonly baseline: number;

  constructor(embedder: CharNgramEmbedder, rescale = false, baseline = 0.0) {
    this.embedder = embedder;
    this.rescale = rescale;
    this.baseline = baseline;
  }

  private bestMatchMean(from: Float64Array[], against: Float64Array[]): number {
    let sum = 0;
    for (const vector of from) {
      let best = -1;
      for (const candidate of against) {
        const similarity = cosine(vector, candidate);
        if (similarity > best) {
          best = similarity;
        }
      }
      sum += best;
    }
    return sum / from.length;
  }

  private adjust(value: number): number {
    if (!this.rescale || this.baseline >= 1) {
      return value;
    }
    return (value - this.baseline) / (1 - this.baseline);
  }

  score(hypothesis: string, reference: string): ScoreResult {
    const hypTokens = tokenize(hypothesis);
    const refTokens = tokenize(reference);
    if (hypTokens.length === 0 && refTokens.length === 0) {
      return { precision: 1, recall: 1, f1: 1 };
    }
    if (hypTokens.length === 0 || refTokens.length === 0) {
      return { precision: 0, recall: 0, f1: 0 };
    }
    const hypVectors = hypTokens.map((t) => this.embedder.embed(t));
    const refVectors = refTokens.map((t) => this.embedder.embed(t));
    const precision = this.adjust(this.bestMatchMean(hypVectors, refVectors));
    const recall = this.adjust(this.bestMatchMean(refVectors, hypVectors));
    const f1 = precision + recall > 0 ? (2 * precision * recall) / (precision + recall) : 0;
    return { precision, recall, f1 };
  }
}
