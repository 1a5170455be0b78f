import { spawn, type ChildProcessWithoutNullStreams } from "node:child_process";
import * as path from "node:path";
import * as readline from "node:readline";
import * as url from "node:url";

import { afterEach, beforeEach, describe, expect, it } from "vitest";

const here = path.dirname(url.fileURLToPath(import.meta.url));
const entry = path.join(here, "..", "dist", "main.js");

interface Session {
  child: ChildProcessWithoutNullStreams;
  lines: AsyncIterableIterator<string>;
}

function start(): Session {
  const child = spawn("node", [entry], { stdio: ["pipe", "pipe", "pipe"] });
  const reader = readline.createInterface({ input: child.stdout, crlfDelay: Infinity });
  return { child, lines: reader[Symbol.asyncIterator]() };
}

async function next(session: Session): Promise<string> {
  const { value, done } = await session.lines.next();
  if (done) throw new Error("sidecar closed unexpectedly");
  return value;
}

describe("wire protocol", () => {
  let session: Session;

  beforeEach(() => {
    session = start();
  });

  afterEach(() => {
    session.child.kill();
  });

  it("emits the hello line before anything else", async () => {
    const hello = JSON.parse(await next(session));
    expect(hello.hello.model_id).toBe("charngram-64-v1");
    expect(hello.hello.rescale).toBe(false);
  });

  it("answers a request and scores hyp=ref at f1 >= 0.99", async () => {
    await next(session); // hello
    session.child.stdin.write(
      JSON.stringify({ id: "7", hypothesis: "go up", reference: "go up" }) + "\n",
    );
    const response = JSON.parse(await next(session));
    expect(response.id).toBe("7");
    expect(response.f1).toBeGreaterThanOrEqual(0.99);
  });

  it("responds to every id in a 380-pair batch exactly once", async () => {
    await next(session);
    const ids: string[] = [];
    for (let i = 0; i < 380; i++) {
      const id = `pair-${i}`;
      ids.push(id);
      session.child.stdin.write(
        JSON.stringify({ id, hypothesis: `sentence number ${i}`, reference: `sentence number ${i % 19}` }) + "\n",
      );
    }
    const seen: string[] = [];
    for (let i = 0; i < 380; i++) {
      const response = JSON.parse(await next(session));
      expect(response.error).toBeUndefined();
      seen.push(response.id);
    }
    expect([...seen].sort()).toEqual([...ids].sort());
  });

  it("returns identical bytes for a repeated batch", async () => {
    await next(session);
    const batch = Array.from({ length: 25 }, (_, i) =>
      JSON.stringify({ id: String(i), hypothesis: `hyp ${i}`, reference: `hyp ${i % 5}` }) + "\n",
    ).join("");

    session.child.stdin.write(batch);
    const first: string[] = [];
    for (let i = 0; i < 25; i++) first.push(await next(session));

    session.child.stdin.write(batch);
    const second: string[] = [];
    for (let i = 0; i < 25; i++) second.push(await next(session));

    expect(second).toEqual(first);
  });

  it("answers malformed lines with an error and keeps going", async () => {
    await next(session);
    session.child.stdin.write('{"id": "x", "hypothesis": 5}\n');
    const error = JSON.parse(await next(session));
    expect(error.id).toBe("x");
    expect(error.error).toBeTruthy();

    session.child.stdin.write('not json at all\n');
    const error2 = JSON.parse(await next(session));
    expect(error2.error).toBeTruthy();

    session.child.stdin.write(JSON.stringify({ id: "ok", hypothesis: "a", reference: "a" }) + "\n");
    const good = JSON.parse(await next(session));
    expect(good.id).toBe("ok");
    expect(good.f1).toBeGreaterThanOrEqual(0.99);
  });

  it("exits cleanly on EOF", async () => {
    await next(session);
    const exited = new Promise<number | null>((resolve) => session.child.on("exit", resolve));
    session.child.stdin.end();
    expect(await exited).toBe(0);
  });
});
