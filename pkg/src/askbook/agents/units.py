"""Structured information units and the shared buffer agents exchange them in.

A unit is the only message shape agents produce: six fields, no free-form
side channel. The buffer keeps at most one live unit per
(role, action, data_source) key; a new unit supersedes the previous one,
which becomes a tombstone until a sweep physically drops it. When the live
count reaches capacity the buffer doubles, so capacity is always
``initial * 2^n``.

Timestamps are logical (run-scoped counters), which keeps replays
byte-identical. All buffer operations are safe under concurrent producers
and consumers: one lock serializes them, making the history trivially
linearizable.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from ..errors import MalformedUnit


class PayloadKind(str, Enum):
    SQL = "sql"
    CODE = "code"
    CHART_SPEC = "chart_spec"
    TABLE_PREVIEW = "table_preview"
    TEXT = "text"


@dataclass(frozen=True)
class Payload:
    kind: PayloadKind
    value: Any

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "value": self.value}

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "Payload":
        return Payload(kind=PayloadKind(obj["kind"]), value=obj["value"])

    def text(self) -> str:
        return self.value if isinstance(self.value, str) else repr(self.value)


@dataclass(frozen=True)
class InformationUnit:
    """One agent output: data source, role, action, description, content,
    timestamp. Every field is required."""

    data_source: str
    role: str
    action: str
    description: str
    content: Payload
    timestamp: int

    def __post_init__(self) -> None:
        missing = [name for name in ("data_source", "role", "action", "description")
                   if not getattr(self, name)]
        if not isinstance(self.content, Payload):
            missing.append("content")
        if self.timestamp is None:
            missing.append("timestamp")
        if missing:
            raise MalformedUnit(f"unit missing field(s): {', '.join(missing)}")

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.role, self.action, self.data_source)

    def to_json(self) -> dict[str, Any]:
        return {"data_source": self.data_source, "role": self.role,
                "action": self.action, "description": self.description,
                "content": self.content.to_json(), "timestamp": self.timestamp}

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "InformationUnit":
        return InformationUnit(
            data_source=obj["data_source"], role=obj["role"], action=obj["action"],
            description=obj["description"], content=Payload.from_json(obj["content"]),
            timestamp=int(obj["timestamp"]))


@dataclass(frozen=True)
class SweepPolicy:
    """max_age=None keeps all live units; max_age=N drops units older than N
    logical ticks relative to ``now`` (0 removes everything, the documented
    degenerate case)."""

    max_age: int | None = None


@dataclass
class _Slot:
    unit: InformationUnit
    seq: int


class SharedBuffer:
    """Thread-safe store of live information units with tombstone tracking."""

    def __init__(self, capacity: int = 8):
        if capacity <= 0:
            raise ValueError("capacity must be positive")
        self.initial_capacity = capacity
        self.capacity = capacity
        self._live: dict[tuple[str, str, str], _Slot] = {}
        self._tombstones: list[InformationUnit] = []
        self._seq = 0
        self._lock = threading.Lock()

    # --- core operations -----------------------------------------------------

    def put(self, unit: InformationUnit) -> "SharedBuffer":
        """Insert a unit, superseding any live unit with the same key.
        Doubles capacity first when the buffer is full."""
        if not isinstance(unit, InformationUnit):
            raise MalformedUnit("not an information unit")
        with self._lock:
            existing = self._live.get(unit.key)
            if existing is not None:
                self._tombstones.append(existing.unit)
            elif len(self._live) >= self.capacity:
                self.capacity *= 2
            self._seq += 1
            self._live[unit.key] = _Slot(unit=unit, seq=self._seq)
        return self

    def sweep(self, policy: SweepPolicy | None = None, now: int | None = None,
              ) -> "SharedBuffer":
        """Drop tombstones; with an age policy, also expire old live units."""
        policy = policy or SweepPolicy()
        with self._lock:
            self._tombstones.clear()
            if policy.max_age is not None:
                horizon = now if now is not None else max(
                    (slot.unit.timestamp for slot in self._live.values()), default=0)
                expired = [key for key, slot in self._live.items()
                           if horizon - slot.unit.timestamp >= policy.max_age]
                for key in expired:
                    del self._live[key]
        return self

    def live_units(self) -> list[InformationUnit]:
        """Live units ordered by timestamp (insertion sequence breaks ties)."""
        with self._lock:
            slots = sorted(self._live.values(), key=lambda s: (s.unit.timestamp, s.seq))
            return [slot.unit for slot in slots]

    def get(self, key: tuple[str, str, str]) -> InformationUnit | None:
        with self._lock:
            slot = self._live.get(key)
            return slot.unit if slot else None

    def supersede_where(self, predicate) -> int:
        """Tombstone live units matching ``predicate``; returns count."""
        with self._lock:
            doomed = [key for key, slot in self._live.items() if predicate(slot.unit)]
            for key in doomed:
                self._tombstones.append(self._live.pop(key).unit)
            return len(doomed)

    # --- inspection ------------------------------------------------------------

    @property
    def live_count(self) -> int:
        with self._lock:
            return len(self._live)

    @property
    def put_count(self) -> int:
        with self._lock:
            return self._seq

    @property
    def tombstone_count(self) -> int:
        with self._lock:
            return len(self._tombstones)

    def snapshot(self) -> dict[str, Any]:
        with self._lock:
            slots = sorted(self._live.values(), key=lambda s: (s.unit.timestamp, s.seq))
            return {"capacity": self.capacity,
                    "live": [slot.unit.to_json() for slot in slots],
                    "tombstones": len(self._tombstones)}
