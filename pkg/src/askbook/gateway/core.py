"""Gateway: the single choke point for completion and embedding calls.

Every model interaction in the engine goes through one Gateway instance, so
swapping the provider swaps the whole engine between live HTTP and the
deterministic scripted mode used by tests and replays. The gateway also keeps
the per-tag token ledger backing the /metrics endpoint.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Protocol


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    tag: str = "general"
    structured_output_schema: str | None = None
    temperature: float = 0.0
    max_tokens: int = 1024

    def __post_init__(self) -> None:
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


@dataclass(frozen=True)
class CompletionResponse:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0


class Provider(Protocol):
    def complete(self, req: CompletionRequest) -> CompletionResponse: ...
    def embed(self, text: str) -> list[float]: ...


@dataclass
class TagLedger:
    calls: int = 0
    prompt_tokens: int = 0
    completion_tokens: int = 0

    def as_dict(self) -> dict[str, int]:
        return {"calls": self.calls, "prompt_tokens": self.prompt_tokens,
                "completion_tokens": self.completion_tokens}


class Gateway:
    """Provider facade with token accounting.

    Safe for concurrent calls; the ledger is guarded by a lock and counters
    are monotone until an explicit reset.
    """

    def __init__(self, provider: Provider):
        self._provider = provider
        self._ledger: dict[str, TagLedger] = {}
        self._lock = threading.Lock()

    def complete(self, req: CompletionRequest | str, tag: str | None = None) -> str:
        if isinstance(req, str):
            req = CompletionRequest(prompt=req, tag=tag or "general")
        resp = self._provider.complete(req)
        with self._lock:
            entry = self._ledger.setdefault(req.tag, TagLedger())
            entry.calls += 1
            entry.prompt_tokens += resp.prompt_tokens
            entry.completion_tokens += resp.completion_tokens
        return resp.text

    def embed(self, text: str) -> list[float]:
        return self._provider.embed(text)

    def token_report(self) -> dict[str, dict[str, int]]:
        """Per-tag {calls, prompt_tokens, completion_tokens} snapshot."""
        with self._lock:
            return {tag: entry.as_dict() for tag, entry in sorted(self._ledger.items())}

    def total_tokens(self) -> int:
        with self._lock:
            return sum(e.prompt_tokens + e.completion_tokens
                       for e in self._ledger.values())

    def reset_ledger(self) -> None:
        with self._lock:
            self._ledger.clear()
