"""Client side of the embedding-score sidecar.

The sidecar is a separate worker process (or local socket service) that
computes BERTScore precision/recall/F1 for (hypothesis, reference) pairs.
Wire protocol, one JSON object per line:

    sidecar -> client   {"hello": {"model_id": "...", "rescale": false}}
    client  -> sidecar  {"id": "0", "hypothesis": "...", "reference": "..."}
    sidecar -> client   {"id": "0", "precision": p, "recall": r, "f1": f}

Scores are cached by (model id, hypothesis, reference), which makes replayed
runs work with no sidecar at all.
"""
from __future__ import annotations

import hashlib
import json
import socket
import subprocess
from pathlib import Path


class SidecarError(RuntimeError):
    pass


def score_key(model_id: str, hypothesis: str, reference: str) -> str:
    payload = "\x1f".join((model_id, hypothesis, reference)).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


class ScoreCache:
    def __init__(self):
        self._data: dict[str, tuple[float, float, float]] = {}

    def __len__(self) -> int:
        return len(self._data)

    def get(self, key: str) -> tuple[float, float, float] | None:
        return self._data.get(key)

    def put(self, key: str, precision: float, recall: float, f1: float) -> None:
        self._data[key] = (precision, recall, f1)

    def load(self, path: str | Path) -> None:
        with open(path, encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    self._data[rec["key"]] = (rec["precision"], rec["recall"], rec["f1"])
                except (json.JSONDecodeError, KeyError) as exc:
                    raise SidecarError(f"corrupt score cache at {path}:{line_no}: {exc}") from exc

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for key in sorted(self._data):
                p, r, f1 = self._data[key]
                f.write(json.dumps({"key": key, "precision": p, "recall": r, "f1": f1}) + "\n")


class SidecarClient:
    """Speaks the line protocol over a child process's pipes or a local socket."""

    def __init__(self, reader, writer, closer):
        self._reader = reader
        self._writer = writer
        self._closer = closer
        hello_line = self._reader.readline()
        if not hello_line:
            raise SidecarError("sidecar closed before sending its hello line")
        try:
            hello = json.loads(hello_line)["hello"]
            self.model_id: str = hello["model_id"]
            self.rescale: bool = bool(hello.get("rescale", False))
        except (json.JSONDecodeError, KeyError) as exc:
            raise SidecarError(f"bad hello line {hello_line!r}") from exc

    @classmethod
    def from_command(cls, argv: list[str]) -> "SidecarClient":
        proc = subprocess.Popen(
            argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, text=True, bufsize=1
        )

        def closer():
            if proc.stdin:
                proc.stdin.close()
            proc.wait(timeout=30)

        return cls(proc.stdout, proc.stdin, closer)

    @classmethod
    def from_socket(cls, host: str, port: int) -> "SidecarClient":
        conn = socket.create_connection((host, port))
        reader = conn.makefile("r", encoding="utf-8")
        writer = conn.makefile("w", encoding="utf-8")

        def closer():
            reader.close()
            writer.close()
            conn.close()

        return cls(reader, writer, closer)

    def score_batch(self, pairs: list[tuple[str, str]]) -> list[tuple[float, float, float]]:
        """Score (hypothesis, reference) pairs; one outstanding batch at a time."""
        for i, (hyp, ref) in enumerate(pairs):
            request = {"id": str(i), "hypothesis": hyp, "reference": ref}
            self._writer.write(json.dumps(request, ensure_ascii=False) + "\n")
        self._writer.flush()

        by_id: dict[str, tuple[float, float, float]] = {}
        for _ in pairs:
            line = self._reader.readline()
            if not line:
                raise SidecarError("sidecar closed mid-batch")
            response = json.loads(line)
            if "error" in response:
                raise SidecarError(f"sidecar error for id {response.get('id')}: {response['error']}")
            by_id[response["id"]] = (response["precision"], response["recall"], response["f1"])
        if set(by_id) != {str(i) for i in range(len(pairs))}:
            raise SidecarError("sidecar response ids are not a permutation of request ids")
        return [by_id[str(i)] for i in range(len(pairs))]

    def close(self) -> None:
        self._closer()


def bertscore(
    hypotheses: list[str],
    references: list[str],
    client: SidecarClient | None = None,
    cache: ScoreCache | None = None,
    model_id: str | None = None,
) -> tuple[list[float], float]:
    """Per-sentence F1 list and its mean; cached pairs never touch the sidecar.

    With no client, every pair must be in the cache (`model_id` then names the
    cache keyspace); otherwise a SidecarError explains how to proceed.
    """
    if len(hypotheses) != len(references):
        raise ValueError(f"{len(hypotheses)} hypotheses vs {len(references)} references")
    cache = cache if cache is not None else ScoreCache()
    mid = client.model_id if client is not None else model_id
    if mid is None:
        raise SidecarError(
            "no sidecar and no model_id for cache lookups; start the sidecar "
            "or pass model_id with a pre-filled score cache"
        )

    keys = [score_key(mid, h, r) for h, r in zip(hypotheses, references)]
    missing = [i for i, k in enumerate(keys) if cache.get(k) is None]
    if missing:
        if client is None:
            raise SidecarError(
                f"{len(missing)} pairs not in the score cache and no sidecar is running; "
                "start the sidecar or rerun offline with a complete cache"
            )
        scored = client.score_batch([(hypotheses[i], references[i]) for i in missing])
        for i, (p, r, f1) in zip(missing, scored):
            cache.put(keys[i], p, r, f1)

    f1s = [cache.get(k)[2] for k in keys]
    return f1s, sum(f1s) / len(f1s) if f1s else 0.0
