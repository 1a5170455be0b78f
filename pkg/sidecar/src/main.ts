/**
 * Sidecar entry point.
 *
 * Default: speak the protocol over stdin/stdout.  With `--listen <port>` it
 * serves the same protocol to each connection on a local TCP socket.
 */
import * as fs from "node:fs";
import * as net from "node:net";
import * as path from "node:path";
import * as url from "node:url";

import { CharNgramEmbedder, type EmbedderConfig } from "./embedder.js";
import { serve } from "./protocol.js";
import { BertScorer } from "./score.js";

interface SidecarConfig extends EmbedderConfig {
  rescale: boolean;
}

function loadConfig(): SidecarConfig {
  const here = path.dirname(url.fileURLToPath(import.meta.url));
  const configPath = process.env.SIDECAR_CONFIG ?? path.join(here, "..", "config.json");
  const raw = JSON.parse(fs.readFileSync(configPath, "utf-8"));
  return {
    model_id: raw.model_id ?? "charngram-64-v1",
    rescale: Boolean(raw.rescale),
    dim: raw.dim ?? 64,
    ngram_min: raw.ngram_min ?? 1,
    ngram_max: raw.ngram_max ?? 3,
  };
}

function main(): void {
  const config = loadConfig();
  const scorer = new BertScorer(new CharNgramEmbedder(config), config.rescale);

  const listenIndex = process.argv.indexOf("--listen");
  if (listenIndex >= 0) {
    const port = Number(process.argv[listenIndex + 1] ?? 0);
    const server = net.createServer((socket) => {
      serve(scorer, config.model_id, config.rescale, socket, socket, () => socket.end());
    });
    server.listen(port, "127.0.0.1", () => {
      const address = server.address();
      if (address && typeof address === "object") {
        console.error(`listening on 127.0.0.1:${address.port}`);
      }
    });
    return;
  }

  serve(scorer, config.model_id, config.rescale, process.stdin, process.stdout, () =>
    process.exit(0),
  );
}

main();
