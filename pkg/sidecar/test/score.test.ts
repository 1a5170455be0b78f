import { describe, expect, it } from "vitest";

import { CharNgramEmbedder, cosine, fnv1a } from "../src/embedder.js";
import { BertScorer, tokenize } from "../src/score.js";

const config = { model_id: "charngram-64-v1", dim: 64, ngram_min: 1, ngram_max: 3 };

function makeScorer(rescale = false, baseline = 0) {
  return new BertScorer(new CharNgramEmbedder(config), rescale, baseline);
}

describe("tokenize", () => {
  it("lowercases and strips edge punctuation", () => {
    expect(tokenize("Hello, World!")).toEqual(["hello", "world"]);
  });

  it("drops empty tokens", () => {
    expect(tokenize("  ...  ")).toEqual([]);
  });
});

describe("embedder", () => {
  it("is deterministic", () => {
    const embedder = new CharNgramEmbedder(config);
    const other = new CharNgramEmbedder(config);
    expect(Array.from(embedder.embed("pambo"))).toEqual(Array.from(other.embed("pambo")));
  });

  it("produces unit vectors", () => {
    const embedder = new CharNgramEmbedder(config);
    const vector = embedder.embed("herodias");
    let norm = 0;
    for (const value of vector) norm += value * value;
    expect(norm).toBeCloseTo(1, 9);
  });

  it("identical tokens reach cosine 1", () => {
    const embedder = new CharNgramEmbedder(config);
    expect(cosine(embedder.embed("monk"), embedder.embed("monk"))).toBeCloseTo(1, 9);
  });

  it("fnv1a is stable", () => {
    expect(fnv1a("abc")).toBe(fnv1a("abc"));
    expect(fnv1a("abc")).not.toBe(fnv1a("abd"));
  });
});

describe("BertScorer", () => {
  it("scores identical pairs at f1 >= 0.99", () => {
    const scorer = makeScorer();
    const { precision, recall, f1 } = scorer.score("the monk wore his tunic", "the monk wore his tunic");
    expect(precision).toBeGreaterThanOrEqual(0.99);
    expect(recall).toBeGreaterThanOrEqual(0.99);
    expect(f1).toBeGreaterThanOrEqual(0.99);
  });

  it("keeps f1 the harmonic mean of precision and recall", () => {
    const scorer = makeScorer();
    const { precision, recall, f1 } = scorer.score("he gave to the poor", "he gave them to the poor");
    const harmonic = (2 * precision * recall) / (precision + recall);
    expect(Math.abs(f1 - harmonic)).toBeLessThan(1e-6);
  });

  it("scores disjoint junk below identical text", () => {
    const scorer = makeScorer();
    const same = scorer.score("go up", "go up").f1;
    const different = scorer.score("zzz qqq", "go up").f1;
    expect(different).toBeLessThan(same);
  });

  it("handles empty sides", () => {
    const scorer = makeScorer();
    expect(scorer.score("", "").f1).toBe(1);
    expect(scorer.score("", "text").f1).toBe(0);
    expect(scorer.score("text", "").f1).toBe(0);
  });

  it("is deterministic across calls", () => {
    const scorer = makeScorer();
    const a = scorer.score("Herodias wished to kill him", "Herodias desired to kill him");
    const b = scorer.score("Herodias wished to kill him", "Herodias desired to kill him");
    expect(a).toEqual(b);
  });

  it("applies baseline rescaling when enabled", () => {
    const plain = makeScorer(false).score("a b", "a c");
    const rescaled = makeScorer(true, 0.5).score("a b", "a c");
    expect(rescaled.precision).toBeCloseTo((plain.precision - 0.5) / 0.5, 9);
  });
});
