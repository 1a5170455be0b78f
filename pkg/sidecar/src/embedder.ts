/**
 * Deterministic token embeddings from hashed character n-grams.
 *
 * Each token is embedded by accumulating all its boundary-marked character
 * n-grams into hash buckets and L2-normalizing the result.  Identical tokens
 * always produce identical vectors, with no model download and no randomness,
 * which keeps sidecar output reproducible across machines and runs.
 */

export interface EmbedderConfig {
  model_id: string;
  dim: number;
  ngram_min: number;
  ngram_max: number;
}

const FNV_OFFSET = 0x811c9dc5;
const FNV_PRIME = 0x01000193;

/** 32-bit FNV-1a hash. */
export function fnv1a(text: string): number {
  let hash = FNV_OFFSET;
  for (let i = 0; i < text.length; i++) {
    hash ^= text.charCodeAt(i);
    hash = Math.imul(hash, FNV_PRIME) >>> 0;
  }
  return hash >>> 0;
}

export class CharNgramEmbedder {
  readonly modelId: string;
  private readonly dim: number;
  private readonly nMin: number;
  private readonly nMax: number;
  private readonly cache = new Map<string, Float64Array>();

  constructor(config: EmbedderConfig) {
    this.modelId = config.model_id;
    this.dim = config.dim;
    this.nMin = config.ngram_min;
    this.nMax = config.ngram_max;
  }

  /** Unit-length embedding for one token. */
  embed(token: string): Float64Array {
    const cached = this.cache.get(token);
    if (cached) {
      return cached;
    }
    const vector = new Float64Array(this.dim);
    const marked = `${token}`;
    for (let n = this.nMin; n <= this.nMax; n++) {
      for (let i = 0; i + n <= marked.length; i++) {
        const gram = marked.slice(i, i + n);
        const hash = fnv1a(`${n}:${gram}`);
        const bucket = hash % this.dim;
        const sign = (hash >>> 16) & 1 ? 1 : -1;
        vector[bucket] += sign;
      }
    }
    let norm = 0;
    for (let i = 0; i < this.dim; i++) {
      norm += vector[i] * vector[i];
    }
    norm = Math.sqrt(norm);
    if (norm > 0) {
      for (let i = 0; i < this.dim; i++) {
        vector[i] /= norm;
      }
    }
    this.cache.set(token, vector);
    return vector;
  }
}

export function cosine(a: Float64Array, b: Float64Array): number {
  let dot = 0;
  for (let i = 0; i < a.length; i++) {
    dot += a[i] * b[i];
  }
  // embeddings are unit length; clamp away float jitter
  return Math.max(-1, Math.min(1, dot));
}
