"""Task-aware indexing of knowledge nodes.

Every node yields one (name, content, tag) entry per task profile, where the
content string concatenates the components the profile asks for (some tasks
need calculation logic, others only descriptions). Two in-process backends
serve retrieval: an inverted-token lexical index and a brute-force cosine
vector index fed by gateway embeddings. Rebuilds construct a fresh handle
that callers swap in atomically; readers hold either the old or the new one.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

from ..gateway import Gateway
from .graph import KnowledgeGraph, KnowledgeNode

_TOKEN_RE = re.compile(r"[a-z0-9_]+")

# Component keys concatenated into entry content, per task profile.
TASK_PROFILES: dict[str, tuple[str, ...]] = {
    "default": ("description", "usage", "tags"),
    "nl2dsl": ("description", "usage", "tags", "calculation_logic",
               "related_columns"),
    "nl2sql": ("description", "usage", "tags", "type"),
    "descriptions_only": ("description",),
}


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


@dataclass(frozen=True)
class IndexEntry:
    name: str
    content: str
    tag: str
    node_id: str


@dataclass
class KnowledgeIndexes:
    """Immutable index handle: one entry per node for one task profile."""

    profile: str
    entries: tuple[IndexEntry, ...]
    _inverted: dict[str, set[int]] = field(default_factory=dict, repr=False)
    _vectors: tuple[tuple[float, ...], ...] = ()

    def entry_for(self, node_id: str) -> IndexEntry | None:
        for entry in self.entries:
            if entry.node_id == node_id:
                return entry
        return None

    # --- lexical ---------------------------------------------------------------

    def lexical_hits(self, query: str) -> list[str]:
        """Node ids with any token overlap against name+content (loose on
        purpose: coarse retrieval maximizes recall)."""
        hits: set[int] = set()
        for token in tokenize(query):
            hits |= self._inverted.get(token, set())
        return [self.entries[i].node_id for i in sorted(hits)]

    # --- semantic ---------------------------------------------------------------

    def semantic_hits(self, query_vector: list[float], threshold: float,
                      ) -> list[str]:
        out = []
        for i, vector in enumerate(self._vectors):
            if cosine(query_vector, vector) >= threshold:
                out.append(self.entries[i].node_id)
        return out

    def vector_of(self, node_id: str) -> tuple[float, ...] | None:
        for i, entry in enumerate(self.entries):
            if entry.node_id == node_id:
                return self._vectors[i]
        return None


def cosine(a, b) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def build_indexes(graph: KnowledgeGraph, task_profile: str,
                  gateway: Gateway) -> KnowledgeIndexes:
    """Index every node under the given task profile.

    Alias nodes are indexed too (their name is the whole point); retrieval
    backtracks them to primaries afterwards.
    """
    keys = TASK_PROFILES.get(task_profile, TASK_PROFILES["default"])
    entries: list[IndexEntry] = []
    vectors: list[tuple[float, ...]] = []
    for node_id in sorted(graph.nodes):
        node: KnowledgeNode = graph.nodes[node_id]
        content = node.text(keys)
        entries.append(IndexEntry(name=node.name, content=content,
                                  tag=node.type.value, node_id=node_id))
        vectors.append(tuple(gateway.embed(content)))
    inverted: dict[str, set[int]] = {}
    for i, entry in enumerate(entries):
        for token in set(tokenize(f"{entry.name} {entry.content}")):
            inverted.setdefault(token, set()).add(i)
    return KnowledgeIndexes(profile=task_profile, entries=tuple(entries),
                            _inverted=inverted, _vectors=tuple(vectors))
