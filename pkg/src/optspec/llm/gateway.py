"""Chat-completion access behind one small interface.

Two backends: a remote HTTP endpoint (one adapter per vendor wire format)
and a scripted backend that replays canned responses for tests and demos.
"""
from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Union

import httpx


class GatewayError(Exception):
    """``kind``: timeout, http, exhausted-retries, script-exhausted or auth."""

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(message)
        self.kind = kind
        self.message = message

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# -- configuration -------------------------------------------------------------


@dataclass(frozen=True)
class RemoteBackend:
    endpoint: str
    model: str
    auth_env: str
    adapter: str = "openai-chat"  # openai-chat | gemini

    def __post_init__(self) -> None:
        if self.adapter not in ADAPTERS:
            raise ValueError(f"unknown adapter {self.adapter!r}; expected one of {', '.join(ADAPTERS)}")


@dataclass(frozen=True)
class ScriptRule:
    """Answer ``response`` when the prompt matches.

    Exactly one matcher is set: ``sha256`` of the full prompt, ``contains``
    (every listed snippet occurs in the prompt) or ``ordinal`` (1-based call
    number on this backend).
    """

    response: str
    sha256: str | None = None
    contains: tuple[str, ...] = ()
    ordinal: int | None = None

    def __post_init__(self) -> None:
        set_count = (self.sha256 is not None) + bool(self.contains) + (self.ordinal is not None)
        if set_count != 1:
            raise ValueError("a script rule needs exactly one of sha256, contains, ordinal")

    def matches(self, prompt: str, digest: str, call: int) -> bool:
        if self.sha256 is not None:
            return self.sha256 == digest
        if self.ordinal is not None:
            return self.ordinal == call
        return all(snippet in prompt for snippet in self.contains)


@dataclass(frozen=True)
class ScriptedBackend:
    """Rules are tried in order, then the sequence is consumed front to back.

    Sequence replay depends on call order, so use rules for concurrent runs.
    """

    sequence: tuple[str, ...] = ()
    rules: tuple[ScriptRule, ...] = ()
    name: str = "scripted"

    @classmethod
    def from_json(cls, text: str, name: str = "scripted") -> "ScriptedBackend":
        """``{"sequence": [...], "rules": [{"contains": [...], "response": "..."}]}``"""
        doc = json.loads(text)
        if isinstance(doc, list):
            return cls(tuple(doc), (), name)
        unknown = set(doc) - {"sequence", "rules", "name"}
        if unknown:
            raise ValueError(f"unknown script keys: {', '.join(sorted(unknown))}")
        rules = []
        for r in doc.get("rules", []):
            contains = r.get("contains", ())
            if isinstance(contains, str):
                contains = (contains,)
            rules.append(ScriptRule(r["response"], r.get("sha256"), tuple(contains), r.get("ordinal")))
        return cls(tuple(doc.get("sequence", ())), tuple(rules), doc.get("name", name))

    @classmethod
    def load(cls, path: str | Path) -> "ScriptedBackend":
        path = Path(path)
        return cls.from_json(path.read_text(encoding="utf-8"), name=f"scripted:{path.stem}")


Backend = Union[RemoteBackend, ScriptedBackend]


@dataclass(frozen=True)
class LlmConfig:
    backend: Backend
    max_output_tokens: int = 8192
    request_timeout: float = 120.0
    rate_limit: float = 60.0  # requests per minute
    retries: int = 3

    def __post_init__(self) -> None:
        if self.retries < 0:
            raise ValueError("retries must be >= 0")
        if isinstance(self.backend, RemoteBackend) and not self.rate_limit > 0:
            raise ValueError("rate_limit must be positive for a remote backend")
        if self.max_output_tokens < 1 or not self.request_timeout > 0:
            raise ValueError("max_output_tokens and request_timeout must be positive")

    @property
    def model_name(self) -> str:
        if isinstance(self.backend, RemoteBackend):
            return self.backend.model
        return self.backend.name


# -- vendor adapters ------------------------------------------------------------


def _openai_request(backend: RemoteBackend, token: str, prompt: str, max_tokens: int):
    body = {
        "model": backend.model,
        "messages": [{"role": "user", "content": prompt}],
        "max_completion_tokens": max_tokens,
    }
    return backend.endpoint, {"Authorization": f"Bearer {token}"}, body


def _openai_text(doc: dict) -> str:
    return doc["choices"][0]["message"]["content"] or ""


def _gemini_request(backend: RemoteBackend, token: str, prompt: str, max_tokens: int):
    url = f"{backend.endpoint.rstrip('/')}/models/{backend.model}:generateContent"
    body = {
        "contents": [{"role": "user", "parts": [{"text": prompt}]}],
        "generationConfig": {"maxOutputTokens": max_tokens},
    }
    return url, {"x-goog-api-key": token}, body


def _gemini_text(doc: dict) -> str:
    parts = doc["candidates"][0]["content"].get("parts", [])
    return "".join(p.get("text", "") for p in parts)


ADAPTERS = {
    "openai-chat": (_openai_request, _openai_text),
    "gemini": (_gemini_request, _gemini_text),
}


# -- rate limiting -----------------------------------------------------------------


class TokenBucket:
    """Blocking token bucket; ``per_minute`` sustained, bursts up to ``capacity``."""

    def __init__(self, per_minute: float, capacity: float = 1.0, clock=time.monotonic, sleep=time.sleep) -> None:
        self.rate = per_minute / 60.0
        self.capacity = max(1.0, capacity)
        self.tokens = self.capacity
        self.clock = clock
        self.sleep = sleep
        self.updated = clock()
        self.lock = threading.Lock()

    def acquire(self) -> None:
        with self.lock:
            while True:
                now = self.clock()
                self.tokens = min(self.capacity, self.tokens + (now - self.updated) * self.rate)
                self.updated = now
                if self.tokens >= 1.0:
                    self.tokens -= 1.0
                    return
                self.sleep((1.0 - self.tokens) / self.rate)


# -- gateway -------------------------------------------------------------------------

Hook = Callable[[str, str], None]


@dataclass
class GatewayStats:
    calls: int = 0
    http_attempts: int = 0
    failures: int = 0


class Gateway:
    """Thread-safe completion client for one configured backend.

    For remote backends the auth token is read from the environment when
    the gateway is built, so a missing token fails before any prompt is sent.
    """

    def __init__(
        self,
        config: LlmConfig,
        *,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        self.config = config
        self.stats = GatewayStats()
        self.hooks: list[Hook] = []
        self._lock = threading.Lock()
        self._sleep = sleep
        self._cursor = 0
        self._calls = 0
        self._client = None
        backend = config.backend
        if isinstance(backend, RemoteBackend):
            token = os.environ.get(backend.auth_env, "")
            if not token:
                raise GatewayError("auth", f"environment variable {backend.auth_env} is not set")
            self._token = token
            self._bucket = TokenBucket(config.rate_limit, clock=clock, sleep=sleep)
            self._client = httpx.Client(timeout=config.request_timeout, transport=transport)

    @property
    def model_name(self) -> str:
        return self.config.model_name

    def close(self) -> None:
        if self._client is not None:
            self._client.close()

    def __enter__(self) -> "Gateway":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def complete(self, prompt: str) -> str:
        if not prompt:
            raise ValueError("prompt must be nonempty")
        if isinstance(self.config.backend, ScriptedBackend):
            response = self._scripted(prompt)
        else:
            response = self._remote(prompt)
        with self._lock:
            self.stats.calls += 1
        for hook in list(self.hooks):
            hook(prompt, response)
        return response

    def _scripted(self, prompt: str) -> str:
        backend = self.config.backend
        digest = sha256_text(prompt)
        with self._lock:
            self._calls += 1
            call = self._calls
            for rule in backend.rules:
                if rule.matches(prompt, digest, call):
                    return rule.response
            if self._cursor < len(backend.sequence):
                self._cursor += 1
                return backend.sequence[self._cursor - 1]
        raise GatewayError(
            "script-exhausted", f"no scripted response left for call {call} (prompt sha256 {digest[:12]})"
        )

    def _remote(self, prompt: str) -> str:
        backend = self.config.backend
        build, parse = ADAPTERS[backend.adapter]
        url, headers, body = build(backend, self._token, prompt, self.config.max_output_tokens)
        last: GatewayError | None = None
        attempts = self.config.retries + 1
        for attempt in range(attempts):
            if attempt:
                self._sleep(min(30.0, 2.0 ** (attempt - 1)))
            self._bucket.acquire()
            with self._lock:
                self.stats.http_attempts += 1
            try:
                resp = self._client.post(url, headers=headers, json=body)
            except httpx.TimeoutException as exc:
                last = GatewayError("timeout", f"request to {url} timed out: {exc}")
                continue
            except httpx.HTTPError as exc:
                last = GatewayError("http", f"request to {url} failed: {exc}")
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last = GatewayError("exhausted-retries", f"{url} kept answering HTTP {resp.status_code}")
                continue
            if resp.status_code >= 400:
                self._failed()
                raise GatewayError("http", f"{url} answered HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return parse(resp.json())
            except (ValueError, KeyError, IndexError, TypeError) as exc:
                self._failed()
                raise GatewayError("http", f"unexpected response shape from {url}: {exc!r}") from exc
        self._failed()
        assert last is not None
        raise GatewayError(last.kind, f"{last.message} (after {attempts} attempt(s))")

    def _failed(self) -> None:
        with self._lock:
            self.stats.failures += 1


@dataclass
class Transcript:
    """Collects (stage, prompt, response) triples for one pipeline run."""

    entries: list[tuple[str, str, str]] = field(default_factory=list)

    def add(self, stage: str, prompt: str, response: str) -> None:
        self.entries.append((stage, prompt, response))

    def digests(self) -> list[dict]:
        return [
            {"stage": stage, "prompt_sha256": sha256_text(p), "response_sha256": sha256_text(r)}
            for stage, p, r in self.entries
        ]
