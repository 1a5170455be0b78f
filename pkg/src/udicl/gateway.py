"""Chat-completion gateway: deterministic caching, bounded concurrency, retries.

Every call is keyed by (model, prompt, decoding contract); warm-cache reruns
never touch the network, which is what makes whole experiment replays
byte-reproducible.  Transport failures become first-class empty completions
so a run always yields one record per sentence.
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field

import requests

from udicl.prompts import Prompt

OPENAI_CHAT = "openai-chat"
TEXT_GENERATION = "text-generation"


class CacheConflictError(ValueError):
    pass


class CacheCorruptError(ValueError):
    pass


class OfflineCacheMissError(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    endpoint: str
    model: str
    dialect: str = OPENAI_CHAT  # "openai-chat" | "text-generation"
    max_new_tokens: int = 128
    decode: str = "greedy"
    seed: int = 42
    api_key_env: str = ""
    timeout: float = 60.0
    max_in_flight: int = 4
    retries: int = 3
    backoff: float = 0.5

    def __post_init__(self):
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        if self.decode != "greedy":
            raise ValueError("only greedy decoding is supported")


@dataclass(frozen=True)
class Completion:
    text: str
    latency_ms: float
    status: str  # "ok" | "http_error" | "timeout" | "empty"
    raw_hash: str = ""


def cache_key(cfg: ModelConfig, prompt_text: str) -> str:
    payload = "\x1f".join(
        (cfg.model, prompt_text, str(cfg.max_new_tokens), cfg.decode, str(cfg.seed))
    ).encode("utf-8")
    return hashlib.sha256(payload).hexdigest()


def _request_body(cfg: ModelConfig, prompt_text: str) -> dict:
    if cfg.dialect == OPENAI_CHAT:
        return {
            "model": cfg.model,
            "messages": [{"role": "user", "content": prompt_text}],
            "max_tokens": cfg.max_new_tokens,
            "temperature": 0,
            "seed": cfg.seed,
        }
    if cfg.dialect == TEXT_GENERATION:
        return {
            "inputs": prompt_text,
            "parameters": {
                "max_new_tokens": cfg.max_new_tokens,
                "do_sample": False,
                "seed": cfg.seed,
            },
        }
    raise ValueError(f"unknown endpoint dialect {cfg.dialect!r}")


def _extract_text(cfg: ModelConfig, payload: dict | list) -> str:
    if cfg.dialect == OPENAI_CHAT:
        return payload["choices"][0]["message"]["content"] or ""
    if isinstance(payload, list):
        payload = payload[0]
    return payload.get("generated_text", "")


class Gateway:
    """Thread-safe translation gateway over one model endpoint."""

    def __init__(self, cfg: ModelConfig, offline: bool = False):
        self.cfg = cfg
        self.offline = offline
        self._cache: dict[str, Completion] = {}
        self._lock = threading.Lock()
        self._in_flight = threading.Semaphore(cfg.max_in_flight)
        self._session = requests.Session()

    # ------------------------------------------------------------- cache --

    def cache_size(self) -> int:
        with self._lock:
            return len(self._cache)

    def cache_export(self, path: str) -> None:
        with self._lock:
            items = sorted(self._cache.items())
        with open(path, "w", encoding="utf-8") as f:
            for key, completion in items:
                f.write(
                    json.dumps(
                        {"key": key, "text": completion.text, "status": completion.status},
                        ensure_ascii=False,
                    )
                    + "\n"
                )

    def cache_import(self, path: str) -> int:
        """Merge a cache file; conflicting texts for one key are an error."""
        imported = 0
        with open(path, encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    key, text, status = rec["key"], rec["text"], rec["status"]
                except (json.JSONDecodeError, KeyError) as exc:
                    raise CacheCorruptError(f"{path}:{line_no}: {exc}") from exc
                completion = Completion(text=text, latency_ms=0.0, status=status)
                with self._lock:
                    existing = self._cache.get(key)
                    if existing is not None and existing.text != text:
                        raise CacheConflictError(
                            f"{path}:{line_no}: key {key[:12]}… has conflicting cached text"
                        )
                    self._cache[key] = completion
                imported += 1
        return imported

    # --------------------------------------------------------- translate --

    def translate(self, prompt: Prompt | str) -> Completion:
        text = prompt.text if isinstance(prompt, Prompt) else prompt
        key = cache_key(self.cfg, text)
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        if self.offline:
            raise OfflineCacheMissError(f"offline mode and cache miss for key {key[:12]}…")

        completion = self._call_endpoint(text)
        with self._lock:
            self._cache[key] = completion
        return completion

    def _call_endpoint(self, prompt_text: str) -> Completion:
        headers = {"Content-Type": "application/json"}
        if self.cfg.api_key_env:
            api_key = os.environ.get(self.cfg.api_key_env, "")
            if api_key:
                headers["Authorization"] = f"Bearer {api_key}"
        body = _request_body(self.cfg, prompt_text)

        start = time.monotonic()
        status = "http_error"
        raw = b""
        for attempt in range(self.cfg.retries + 1):
            if attempt:
                time.sleep(self.cfg.backoff * (2 ** (attempt - 1)))
            try:
                with self._in_flight:
                    response = self._session.post(
                        self.cfg.endpoint, json=body, headers=headers, timeout=self.cfg.timeout
                    )
            except requests.Timeout:
                status = "timeout"
                continue
            except requests.RequestException:
                status = "http_error"
                continue
            raw = response.content
            if response.status_code >= 500 or response.status_code == 429:
                status = "http_error"
                continue
            if response.status_code != 200:
                status = "http_error"
                break
            try:
                text = _extract_text(self.cfg, response.json()).strip()
            except (ValueError, KeyError, IndexError):
                status = "http_error"
                break
            latency = (time.monotonic() - start) * 1000
            return Completion(
                text=text,
                latency_ms=latency,
                status="ok" if text else "empty",
                raw_hash=hashlib.sha256(raw).hexdigest(),
            )

        latency = (time.monotonic() - start) * 1000
        return Completion(text="", latency_ms=latency, status=status, raw_hash=hashlib.sha256(raw).hexdigest())
