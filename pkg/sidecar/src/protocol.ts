/**
 * Line-delimited JSON protocol: hello first, then one response per request.
 *
 *   out:  {"hello": {"model_id": "...", "rescale": false}}
 *   in:   {"id": "0", "hypothesis": "...", "reference": "..."}
 *   out:  {"id": "0", "precision": p, "recall": r, "f1": f}
 *
 * A malformed request produces an error response carrying whatever id could
 * be recovered; processing then continues.  EOF means a clean exit.
 */
import * as readline from "node:readline";
import type { Readable, Writable } from "node:stream";

import { BertScorer } from "./score.js";

export interface ScoreRequest {
  id: string;
  hypothesis: string;
  reference: string;
}

export function helloLine(modelId: string, rescale: boolean): string {
  return JSON.stringify({ hello: { model_id: modelId, rescale } });
}

export function handleLine(scorer: BertScorer, line: string): string {
  let recoveredId: string | null = null;
  try {
    const parsed = JSON.parse(line) as Partial<ScoreRequest>;
    if (typeof parsed.id !== "undefined") {
      recoveredId = String(parsed.id);
    }
    if (
      typeof parsed.id === "undefined" ||
      typeof parsed.hypothesis !== "string" ||
      typeof parsed.reference !== "string"
    ) {
      return JSON.stringify({ id: recoveredId, error: "request needs id, hypothesis, reference" });
    }
    const { precision, recall, f1 } = scorer.score(parsed.hypothesis, parsed.reference);
    return JSON.stringify({ id: String(parsed.id), precision, recall, f1 });
  } catch (error) {
    const message = error instanceof Error ? error.message : String(error);
    return JSON.stringify({ id: recoveredId, error: message });
  }
}

export function serve(
  scorer: BertScorer,
  modelId: string,
  rescale: boolean,
  input: Readable,
  output: Writable,
  onClose?: () => void,
): void {
  output.write(helloLine(modelId, rescale) + "\n");
  const lines = readline.createInterface({ input, crlfDelay: Infinity });
  lines.on("line", (line) => {
    if (line.trim().length === 0) {
      return;
    }
    output.write(handleLine(scorer, line) + "\n");
  });
  lines.on("close", () => {
    if (onClose) {
      onClose();
    }
  });
}
