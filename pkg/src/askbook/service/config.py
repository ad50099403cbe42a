"""Service configuration: validated at startup, unknown keys rejected."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..errors import ConfigError
from ..knowledge.retrieve import RetrievalConfig
from ..knowledge.types import GenConfig

_KNOWN_KEYS = {"store_dir", "host", "port", "auth_token", "provider",
               "fixtures_dir", "now", "retrieval", "gen", "buffer",
               "similarity_threshold"}
_KNOWN_BUFFER_KEYS = {"capacity", "sweep_every"}
_KNOWN_RETRIEVAL_KEYS = {"weights", "top_k", "coarse_threshold"}
_KNOWN_GEN_KEYS = {"score_threshold", "max_attempts", "dedup_similarity"}


@dataclass(frozen=True)
class Config:
    store_dir: str = "./askbook_store"
    host: str = "127.0.0.1"
    port: int = 8787
    auth_token: str | None = None
    provider: str = "scripted"                 # "scripted" | "live"
    fixtures_dir: str | None = None
    now: str | None = None                     # ISO date injected into rewrites
    retrieval: RetrievalConfig = field(default_factory=RetrievalConfig)
    gen: GenConfig = field(default_factory=GenConfig)
    buffer_capacity: int = 8
    sweep_every: int = 16
    similarity_threshold: float = 0.25

    def __post_init__(self) -> None:
        if self.provider not in ("scripted", "live"):
            raise ConfigError(f"provider must be scripted|live, got {self.provider!r}")
        if self.provider == "scripted" and not self.fixtures_dir:
            raise ConfigError("scripted provider requires fixtures_dir")
        if self.buffer_capacity <= 0:
            raise ConfigError("buffer.capacity must be positive")
        if self.sweep_every <= 0:
            raise ConfigError("buffer.sweep_every must be positive")
        if not 0.0 <= self.similarity_threshold <= 1.0:
            raise ConfigError("similarity_threshold must be in [0, 1]")


def _reject_unknown(obj: dict[str, Any], known: set[str], where: str) -> None:
    for key in obj:
        if key not in known:
            raise ConfigError(f"unknown config key {where}{key!r}")


def load_config(source: str | Path | dict[str, Any]) -> Config:
    """Parse a config dict or JSON file into a validated Config."""
    if isinstance(source, (str, Path)):
        try:
            raw = json.loads(Path(source).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
    else:
        raw = dict(source)
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown(raw, _KNOWN_KEYS, "")

    retrieval_raw = raw.get("retrieval", {})
    _reject_unknown(retrieval_raw, _KNOWN_RETRIEVAL_KEYS, "retrieval.")
    gen_raw = raw.get("gen", {})
    _reject_unknown(gen_raw, _KNOWN_GEN_KEYS, "gen.")
    buffer_raw = raw.get("buffer", {})
    _reject_unknown(buffer_raw, _KNOWN_BUFFER_KEYS, "buffer.")

    try:
        retrieval = RetrievalConfig(
            weights=tuple(retrieval_raw.get("weights", (1 / 3, 1 / 3, 1 / 3))),
            top_k=retrieval_raw.get("top_k", 20),
            coarse_threshold=retrieval_raw.get("coarse_threshold", 0.15))
        gen = GenConfig(
            score_threshold=gen_raw.get("score_threshold", 4),
            max_attempts=gen_raw.get("max_attempts", 3),
            dedup_similarity=gen_raw.get("dedup_similarity", 0.9))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    return Config(
        store_dir=raw.get("store_dir", "./askbook_store"),
        host=raw.get("host", "127.0.0.1"),
        port=int(raw.get("port", 8787)),
        auth_token=raw.get("auth_token"),
        provider=raw.get("provider", "scripted"),
        fixtures_dir=raw.get("fixtures_dir"),
        now=raw.get("now"),
        retrieval=retrieval,
        gen=gen,
        buffer_capacity=int(buffer_raw.get("capacity", 8)),
        sweep_every=int(buffer_raw.get("sweep_every", 16)),
        similarity_threshold=float(raw.get("similarity_threshold", 0.25)),
    )
