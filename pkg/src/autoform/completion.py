"""Completion-model providers: a real HTTP backend and a seeded offline mock.

The HTTP backend posts ``{model, prompt, temperature, n, max_tokens, stop}``
to a configurable completions endpoint and reads the conventional
``{"choices": [{"text", "index", "finish_reason"}]}`` response shape.  The
auth token comes from the ``AUTOFORM_API_KEY`` environment variable.

The mock is fully deterministic given (prompt, seed, temperature, n): it
replays scripted completions when the prompt's SHA-256 fingerprint matches
a script entry and otherwise falls back to seeded template generation, so
concurrent use cannot perturb per-prompt results.
"""
from __future__ import annotations

import hashlib
import json
import os
import random
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

DEFAULT_MAX_TOKENS = 2000


class ProviderError(RuntimeError):
    pass


class AuthenticationError(ProviderError):
    pass


class RateLimitExhausted(ProviderError):
    pass


class ProviderTimeout(ProviderError):
    pass


@dataclass(frozen=True)
class SamplingConfig:
    temperature: float = 0.0
    n: int = 1
    max_tokens: int = DEFAULT_MAX_TOKENS
    stop_sequences: tuple[str, ...] = ()
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


class FinishReason:
    STOP = "stop"
    LENGTH = "length"
    ERROR = "error"


@dataclass(frozen=True)
class RawCompletion:
    text: str
    index: int
    finish_reason: str = FinishReason.STOP

    def __post_init__(self) -> None:
        if not self.text and self.finish_reason != FinishReason.ERROR:
            raise ValueError("empty completion text requires finish_reason=error")


class CompletionProvider(Protocol):
    def complete(self, prompt: str, cfg: SamplingConfig) -> list[RawCompletion]: ...


def prompt_fingerprint(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def request_completions(
    prompt: str, cfg: SamplingConfig, provider: CompletionProvider
) -> list[RawCompletion]:
    return provider.complete(prompt, cfg)


_FALLBACK_NAMES = (
    "add_le_add", "mul_comm", "zero_lt_one", "sub_nonneg", "abs_nonneg",
    "pow_two", "le_trans", "nat.succ_le", "set.mem_union", "div_pos",
)


@dataclass
class MockCompletionProvider:
    """Deterministic provider for offline tests and reproducible runs."""

    seed: int = 0
    script: dict[str, list[str]] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def _fallback_text(self, seed: int, fingerprint: str, temperature: float, index: int) -> str:
        # Index-independent at temperature 0 so all n completions agree.
        stream = 0 if temperature == 0 else index
        rng = random.Random(f"{seed}:{fingerprint}:{temperature}:{stream}")
        name = rng.choice(_FALLBACK_NAMES)
        a, b = rng.randrange(1, 9), rng.randrange(1, 9)
        return f"(n : ℕ) (h : {a} ≤ n) : {name} {a} {b} n :="

    def complete(self, prompt: str, cfg: SamplingConfig) -> list[RawCompletion]:
        fingerprint = prompt_fingerprint(prompt)
        seed = self.seed if cfg.seed is None else cfg.seed
        with self._lock:
            scripted = self.script.get(fingerprint)
        out: list[RawCompletion] = []
        for i in range(cfg.n):
            if scripted:
                text = scripted[i % len(scripted)]
            else:
                text = self._fallback_text(seed, fingerprint, cfg.temperature, i)
            out.append(RawCompletion(text=text, index=i))
        return out


def mock_with_script(entries: dict[str, list[str]], seed: int = 0) -> MockCompletionProvider:
    """Provider replaying scripted completions keyed by prompt fingerprint."""
    if len(entries) != len(set(entries)):
        raise ValueError("duplicate fingerprints in script")
    return MockCompletionProvider(seed=seed, script=dict(entries))


def script_entry(prompt: str, texts: list[str]) -> tuple[str, list[str]]:
    return prompt_fingerprint(prompt), list(texts)


def load_script(path: str | Path) -> dict[str, list[str]]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return {str(k): [str(t) for t in v] for k, v in data.items()}


@dataclass
class HttpCompletionProvider:
    """Client for an HTTP completions endpoint with retry and backoff."""

    url: str
    model: str
    api_key_env: str = "AUTOFORM_API_KEY"
    timeout: float = 120.0
    max_retries: int = 4
    base_delay: float = 1.0

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.api_key_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, prompt: str, cfg: SamplingConfig) -> list[RawCompletion]:
        import requests

        body = {
            "model": self.model,
            "prompt": prompt,
            "temperature": cfg.temperature,
            "n": cfg.n,
            "max_tokens": cfg.max_tokens,
            "stop": list(cfg.stop_sequences) or None,
        }
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                resp = requests.post(self.url, json=body, headers=self._headers(), timeout=self.timeout)
            except requests.Timeout as exc:
                last_error = ProviderTimeout(str(exc))
            except requests.RequestException as exc:
                last_error = ProviderError(str(exc))
            else:
                if resp.status_code in (401, 403):
                    raise AuthenticationError(f"completions endpoint returned {resp.status_code}")
                if resp.status_code == 429:
                    last_error = RateLimitExhausted("rate limited")
                elif resp.status_code >= 500:
                    last_error = ProviderError(f"server error {resp.status_code}")
                else:
                    resp.raise_for_status()
                    return self._parse(resp.json())
            if attempt < self.max_retries:
                time.sleep(self.base_delay * (2**attempt))
        assert last_error is not None
        raise last_error

    @staticmethod
    def _parse(payload: dict) -> list[RawCompletion]:
        out: list[RawCompletion] = []
        for i, choice in enumerate(payload.get("choices", [])):
            text = choice.get("text", "")
            reason = choice.get("finish_reason") or FinishReason.STOP
            if reason not in (FinishReason.STOP, FinishReason.LENGTH, FinishReason.ERROR):
                reason = FinishReason.STOP
            index = int(choice.get("index", i))
            if not text:
                out.append(RawCompletion(text="", index=index, finish_reason=FinishReason.ERROR))
            else:
                out.append(RawCompletion(text=text, index=index, finish_reason=reason))
        out.sort(key=lambda c: c.index)
        return out
