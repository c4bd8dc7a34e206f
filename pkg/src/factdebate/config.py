"""Layered run configuration: defaults, config file, environment, flags.

Later layers override earlier ones key by key. The config file is JSON with
the same key names as ``RunConfig`` fields; environment variables use the
``FACTDEBATE_`` prefix with the field name upper-cased (for example
``FACTDEBATE_MIN_ROUNDS=3``).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any, Mapping

from .gateway import (
    BackendDescriptor,
    BackendKind,
    CallBudget,
    CompletionCache,
    Gateway,
    TokenBucket,
    build_backend,
)
from .model import DebateConfig, FactDebateError, TransitionPolicy
from .retrieval import FixtureSearchProvider, SearchProvider, WebSearchProvider

ENV_PREFIX = "FACTDEBATE_"


class ConfigError(FactDebateError):
    """The resolved configuration is unusable."""


@dataclass
class RunConfig:
    """Everything a pipeline run needs, resolvable from four layers."""

    backend: str = "scripted"  # http | scripted | replay
    script_file: str | None = None
    fixtures_dir: str | None = None
    endpoint: str | None = None
    api_key: str | None = None
    model_id: str = "default"
    temperature: float = 0.0
    max_tokens: int = 1024
    cache_dir: str | None = None
    budget: int = 500
    max_retries: int = 2
    rate_limit: float | None = None
    policy: str = TransitionPolicy.TRUE_TO_SKEPTIC.value
    min_rounds: int = 2
    max_rounds: int = 5
    evidence_k: int = 10
    search_fixtures: str | None = None
    search_endpoint: str | None = None
    search_api_key: str | None = None
    parallelism: int = 1
    seed: int = 0

    def debate_config(self) -> DebateConfig:
        return DebateConfig(
            policy=TransitionPolicy(self.policy),
            min_rounds=self.min_rounds,
            max_rounds=self.max_rounds,
            evidence_k=self.evidence_k,
        )

    def backend_descriptor(self) -> BackendDescriptor:
        kind = BackendKind(self.backend)
        if kind == BackendKind.SCRIPTED:
            if not self.script_file:
                raise ConfigError("scripted backend requires script_file")
            return BackendDescriptor(kind, {"script": self.script_file})
        if kind == BackendKind.REPLAY:
            if not self.fixtures_dir:
                raise ConfigError("replay backend requires fixtures_dir")
            return BackendDescriptor(kind, {"fixtures_dir": self.fixtures_dir})
        if not self.endpoint:
            raise ConfigError("http backend requires endpoint")
        return BackendDescriptor(
            kind, {"endpoint": self.endpoint, "api_key": self.api_key}
        )

    def build_gateway(self) -> Gateway:
        return Gateway(
            backend=build_backend(self.backend_descriptor()),
            cache=CompletionCache(self.cache_dir) if self.cache_dir else None,
            budget=CallBudget(self.budget),
            rate_limiter=TokenBucket(self.rate_limit) if self.rate_limit else None,
            model_id=self.model_id,
            temperature=self.temperature,
            max_tokens=self.max_tokens,
        )

    def build_search_provider(self) -> SearchProvider | None:
        if self.search_fixtures:
            return FixtureSearchProvider(self.search_fixtures)
        if self.search_endpoint:
            return WebSearchProvider(self.search_endpoint, api_key=self.search_api_key)
        return None


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _parse_env_value(name: str, raw: str) -> Any:
    declared = _FIELD_TYPES[name]
    if declared in ("int", int):
        return int(raw)
    if declared in ("float", float, "float | None"):
        return float(raw)
    return raw


def load_config_file(path: str | Path) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    unknown = set(data) - set(_FIELD_TYPES)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return data


def resolve_run_config(
    config_file: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> RunConfig:
    """Resolve a run config with precedence flags > env > file > defaults.

    ``overrides`` holds flag values; entries that are None are treated as
    not provided and do not shadow lower layers.
    """
    env = os.environ if env is None else env
    values: dict[str, Any] = {}
    if config_file is not None:
        values.update(load_config_file(config_file))
    for name in _FIELD_TYPES:
        raw = env.get(f"{ENV_PREFIX}{name.upper()}")
        if raw is not None:
            try:
                values[name] = _parse_env_value(name, raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {ENV_PREFIX}{name.upper()}: {exc}") from exc
    for name, value in (overrides or {}).items():
        if name not in _FIELD_TYPES:
            raise ConfigError(f"unknown config key {name!r}")
        if value is not None:
            values[name] = value
    return RunConfig(**values)
