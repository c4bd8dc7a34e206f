"""Provider-agnostic completion gateway.

Three interchangeable backends sit behind one ``complete`` call:

* ``HttpBackend`` posts to a configured provider endpoint with retry and
  exponential backoff.
* ``ScriptedBackend`` replays a fixed queue of completions, for tests and
  offline experiments.
* ``ReplayBackend`` serves completions recorded per prompt digest, so a real
  provider session can be reproduced bit-for-bit offline.

A content-addressed file cache, a per-run call budget, and a token-bucket
rate limiter can be layered on via ``Gateway``. All pieces are safe for
concurrent callers: the scripted queue and the token bucket lock internally,
and the cache writes atomically (write to a temp file, then rename).
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping

import httpx

from .model import FactDebateError

log = logging.getLogger(__name__)

DEFAULT_CALL_BUDGET = 500


class GatewayError(FactDebateError):
    """Base class for gateway failures."""


class TransportError(GatewayError):
    """Provider unreachable or persistently failing after retries."""


class BudgetExceeded(GatewayError):
    """The per-run completion budget was exhausted."""


class ScriptExhausted(GatewayError):
    """A scripted backend ran out of queued completions."""


class ReplayMiss(GatewayError):
    """No recorded completion exists for the requested prompt digest."""


class CacheCorrupt(GatewayError):
    """A cached entry failed its checksum; the cache needs manual repair."""


class BackendKind(str, Enum):
    HTTP_PROVIDER = "http"
    SCRIPTED = "scripted"
    REPLAY = "replay"


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    temperature: float = 0.0
    max_tokens: int = 1024
    model_id: str = "default"

    def __post_init__(self) -> None:
        if not self.prompt:
            raise ValueError("prompt must be non-empty")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be positive")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    provider_meta: Mapping[str, Any] = field(default_factory=dict)
    from_cache: bool = False


@dataclass(frozen=True)
class BackendDescriptor:
    kind: BackendKind
    config: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind == BackendKind.SCRIPTED and "script" not in self.config:
            raise ValueError("scripted backend requires a 'script' entry")
        if self.kind == BackendKind.REPLAY and "fixtures_dir" not in self.config:
            raise ValueError("replay backend requires a 'fixtures_dir' entry")


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def request_cache_key(request: CompletionRequest) -> str:
    """Stable content address of a request.

    Keys collide only on identical (prompt, temperature, max_tokens, model_id)
    tuples; the digest is 256 bits.
    """
    canonical = json.dumps(
        {
            "prompt": request.prompt,
            "temperature": float(request.temperature),
            "max_tokens": request.max_tokens,
            "model_id": request.model_id,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class ScriptedBackend:
    """Serves a fixed queue of completions, one per call, thread-safely.

    Every served prompt is recorded in ``calls`` so tests can inspect what
    the pipeline actually asked.
    """

    def __init__(self, script: Iterable[str]):
        self._queue: list[str] = list(script)
        self._cursor = 0
        self._lock = threading.Lock()
        self.calls: list[str] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        """Load a script from a JSON file holding an array of strings."""
        entries = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(entries, list) or not all(isinstance(e, str) for e in entries):
            raise ValueError(f"script file {path} must hold a JSON array of strings")
        return cls(entries)

    @property
    def remaining(self) -> int:
        with self._lock:
            return len(self._queue) - self._cursor

    def complete(self, request: CompletionRequest) -> CompletionResult:
        with self._lock:
            if self._cursor >= len(self._queue):
                raise ScriptExhausted(
                    f"script exhausted after {len(self._queue)} completions"
                )
            text = self._queue[self._cursor]
            self._cursor += 1
            self.calls.append(request.prompt)
        return CompletionResult(text=text, provider_meta={"backend": "scripted"})


class ReplayBackend:
    """Serves completions recorded one file per prompt digest."""

    def __init__(self, fixtures_dir: str | Path):
        self.fixtures_dir = Path(fixtures_dir)

    def _entry_path(self, digest: str) -> Path:
        return self.fixtures_dir / f"{digest}.json"

    def record(self, prompt: str, text: str) -> Path:
        """Store a completion for later replay; returns the fixture path."""
        self.fixtures_dir.mkdir(parents=True, exist_ok=True)
        path = self._entry_path(prompt_digest(prompt))
        payload = {"prompt_sha256": prompt_digest(prompt), "text": text}
        _atomic_write_text(path, json.dumps(payload, ensure_ascii=False, indent=2) + "\n")
        return path

    def complete(self, request: CompletionRequest) -> CompletionResult:
        digest = prompt_digest(request.prompt)
        path = self._entry_path(digest)
        if not path.exists():
            raise ReplayMiss(f"no replay fixture for prompt digest {digest}")
        payload = json.loads(path.read_text(encoding="utf-8"))
        return CompletionResult(
            text=payload["text"],
            provider_meta={"backend": "replay", "prompt_sha256": digest},
        )


class RecordingBackend:
    """Wraps another backend and records every exchange as replay fixtures."""

    def __init__(self, inner: Any, fixtures_dir: str | Path):
        self.inner = inner
        self.recorder = ReplayBackend(fixtures_dir)

    def complete(self, request: CompletionRequest) -> CompletionResult:
        result = self.inner.complete(request)
        self.recorder.record(request.prompt, result.text)
        return result


class HttpBackend:
    """Posts completion requests to a JSON-over-HTTP provider endpoint.

    Wire contract: POST ``{"model", "prompt", "temperature", "max_tokens"}``,
    response ``{"text": "..."}``. Transient failures (transport errors and
    5xx statuses) are retried with exponential backoff; 4xx statuses fail
    immediately.
    """

    def __init__(
        self,
        endpoint: str,
        api_key: str | None = None,
        max_retries: int = 3,
        backoff_base: float = 0.25,
        timeout: float = 30.0,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.endpoint = endpoint
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._sleep = sleep
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(headers=headers, timeout=timeout, transport=transport)

    def complete(self, request: CompletionRequest) -> CompletionResult:
        payload = {
            "model": request.model_id,
            "prompt": request.prompt,
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                self._sleep(self.backoff_base * (2 ** (attempt - 1)))
            try:
                response = self._client.post(self.endpoint, json=payload)
            except httpx.TransportError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = TransportError(f"provider returned {response.status_code}")
                continue
            if response.status_code >= 400:
                raise TransportError(
                    f"provider rejected the request: {response.status_code} {response.text}"
                )
            body = response.json()
            text = body.get("text", "")
            if text == "":
                log.warning("provider returned an empty completion")
            return CompletionResult(
                text=text,
                provider_meta={"backend": "http", "status": response.status_code},
            )
        raise TransportError(
            f"provider unreachable after {self.max_retries + 1} attempts: {last_error}"
        )


def build_backend(descriptor: BackendDescriptor) -> Any:
    """Construct a backend instance from its descriptor."""
    cfg = dict(descriptor.config)
    if descriptor.kind == BackendKind.SCRIPTED:
        script = cfg["script"]
        if isinstance(script, (str, Path)):
            return ScriptedBackend.from_file(script)
        return ScriptedBackend(script)
    if descriptor.kind == BackendKind.REPLAY:
        return ReplayBackend(cfg["fixtures_dir"])
    if "endpoint" not in cfg:
        raise ValueError("http backend requires an 'endpoint' entry")
    return HttpBackend(
        endpoint=cfg["endpoint"],
        api_key=cfg.get("api_key"),
        max_retries=int(cfg.get("max_retries", 3)),
    )


def complete(request: CompletionRequest, backend: Any) -> CompletionResult:
    """Run one completion against a backend, verbatim."""
    return backend.complete(request)


class CompletionCache:
    """Content-addressed completion store, one checksummed file per key."""

    def __init__(self, cache_dir: str | Path):
        self.cache_dir = Path(cache_dir)
        self.cache_dir.mkdir(parents=True, exist_ok=True)

    def _entry_path(self, key: str) -> Path:
        return self.cache_dir / f"{key}.json"

    def get(self, key: str) -> str | None:
        path = self._entry_path(key)
        if not path.exists():
            return None
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
            text = payload["text"]
            checksum = payload["sha256"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise CacheCorrupt(f"unreadable cache entry {path}: {exc}") from exc
        if hashlib.sha256(text.encode("utf-8")).hexdigest() != checksum:
            raise CacheCorrupt(f"checksum mismatch for cache entry {path}")
        return text

    def put(self, key: str, text: str) -> None:
        payload = {
            "text": text,
            "sha256": hashlib.sha256(text.encode("utf-8")).hexdigest(),
        }
        _atomic_write_text(
            self._entry_path(key), json.dumps(payload, ensure_ascii=False) + "\n"
        )


def cached_complete(
    request: CompletionRequest, backend: Any, cache: CompletionCache
) -> CompletionResult:
    """Serve from the cache when possible, otherwise delegate and store."""
    key = request_cache_key(request)
    hit = cache.get(key)
    if hit is not None:
        return CompletionResult(
            text=hit, provider_meta={"cache_key": key}, from_cache=True
        )
    result = complete(request, backend)
    cache.put(key, result.text)
    return result


class CallBudget:
    """Thread-safe ceiling on provider calls within one run."""

    def __init__(self, limit: int | None = DEFAULT_CALL_BUDGET):
        self.limit = limit
        self._count = 0
        self._lock = threading.Lock()

    @property
    def count(self) -> int:
        with self._lock:
            return self._count

    def charge(self) -> None:
        with self._lock:
            if self.limit is not None and self._count >= self.limit:
                raise BudgetExceeded(f"call budget of {self.limit} completions exhausted")
            self._count += 1


class TokenBucket:
    """Shared rate limiter: ``rate`` tokens per second, bucket of ``capacity``."""

    def __init__(
        self,
        rate: float,
        capacity: float | None = None,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate
        self.capacity = capacity if capacity is not None else max(1.0, rate)
        self._tokens = self.capacity
        self._clock = clock
        self._sleep = sleep
        self._last = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate)
                self._last = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.rate
            self._sleep(wait)


class Gateway:
    """Completion entry point combining backend, cache, budget, and rate limit.

    Cache hits are free: they consume neither budget nor rate-limit tokens,
    which is what makes a second identical pipeline run perform zero provider
    calls.
    """

    def __init__(
        self,
        backend: Any,
        cache: CompletionCache | None = None,
        budget: CallBudget | None = None,
        rate_limiter: TokenBucket | None = None,
        model_id: str = "default",
        temperature: float = 0.0,
        max_tokens: int = 1024,
    ):
        self.backend = backend
        self.cache = cache
        self.budget = budget if budget is not None else CallBudget(DEFAULT_CALL_BUDGET)
        self.rate_limiter = rate_limiter
        self.model_id = model_id
        self.temperature = temperature
        self.max_tokens = max_tokens

    @property
    def provider_calls(self) -> int:
        return self.budget.count

    def request(self, prompt: str) -> CompletionRequest:
        return CompletionRequest(
            prompt=prompt,
            temperature=self.temperature,
            max_tokens=self.max_tokens,
            model_id=self.model_id,
        )

    def complete(self, request: CompletionRequest) -> CompletionResult:
        if self.cache is not None:
            key = request_cache_key(request)
            hit = self.cache.get(key)
            if hit is not None:
                return CompletionResult(
                    text=hit, provider_meta={"cache_key": key}, from_cache=True
                )
        self.budget.charge()
        if self.rate_limiter is not None:
            self.rate_limiter.acquire()
        result = complete(request, self.backend)
        if self.cache is not None:
            self.cache.put(request_cache_key(request), result.text)
        return result

    def complete_prompt(self, prompt: str) -> CompletionResult:
        return self.complete(self.request(prompt))


def _atomic_write_text(path: Path, content: str) -> None:
    tmp = path.with_name(f".{path.name}.{os.getpid()}.{threading.get_ident()}.tmp")
    tmp.write_text(content, encoding="utf-8")
    os.replace(tmp, path)
