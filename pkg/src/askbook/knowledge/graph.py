"""Knowledge graph: tree-structured nodes plus alias cross-links.

Primary nodes (database -> table -> column -> value, and free-standing
jargon) form a forest under ``parent``. Alias nodes sit outside the tree and
carry exactly one associative edge to a primary node; ``backtrack`` follows
it. Node ids are deterministic paths, which makes upserts idempotent.

Reads are lock-free on the node map snapshot; mutations are serialized by a
per-graph lock.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable

from ..errors import OrphanNode
from .types import KnowledgeBundle


class NodeType(str, Enum):
    DATABASE = "database"
    TABLE = "table"
    COLUMN = "column"
    VALUE = "value"
    JARGON = "jargon"
    ALIAS = "alias"


PRIMARY_TYPES = frozenset(t for t in NodeType if t is not NodeType.ALIAS)


@dataclass
class KnowledgeNode:
    id: str
    type: NodeType
    name: str
    components: dict[str, Any] = field(default_factory=dict)
    parent: str | None = None
    target: str | None = None        # alias nodes only: the associative edge

    def text(self, keys: Iterable[str] | None = None) -> str:
        """Concatenated component text, optionally restricted to ``keys``."""
        parts = [self.name]
        selected = self.components if keys is None else {
            k: self.components[k] for k in keys if k in self.components}
        for key in sorted(selected):
            value = selected[key]
            if isinstance(value, (list, tuple)):
                parts.extend(str(v) for v in value)
            elif value:
                parts.append(str(value))
        return " ".join(parts)

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"id": self.id, "type": self.type.value,
                               "name": self.name, "components": self.components}
        if self.parent:
            obj["parent"] = self.parent
        if self.target:
            obj["target"] = self.target
        return obj

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "KnowledgeNode":
        return KnowledgeNode(id=obj["id"], type=NodeType(obj["type"]),
                             name=obj["name"], components=obj.get("components", {}),
                             parent=obj.get("parent"), target=obj.get("target"))


class KnowledgeGraph:
    def __init__(self) -> None:
        self.nodes: dict[str, KnowledgeNode] = {}
        self._lock = threading.Lock()

    # --- structure -------------------------------------------------------------

    def add_node(self, node: KnowledgeNode) -> KnowledgeNode:
        with self._lock:
            if node.parent is not None and node.parent not in self.nodes:
                raise OrphanNode(f"{node.id}: parent {node.parent!r} does not exist")
            if node.type is NodeType.ALIAS:
                if not node.target or node.target not in self.nodes:
                    raise OrphanNode(f"alias {node.id}: target missing")
            existing = self.nodes.get(node.id)
            if existing is not None:
                existing.components.update(node.components)
                existing.name = node.name
                return existing
            self.nodes[node.id] = node
            return node

    def get(self, node_id: str) -> KnowledgeNode | None:
        return self.nodes.get(node_id)

    def children(self, node_id: str) -> list[KnowledgeNode]:
        return sorted((n for n in self.nodes.values() if n.parent == node_id),
                      key=lambda n: n.id)

    def backtrack(self, node: KnowledgeNode) -> KnowledgeNode:
        """Resolve an alias to its primary node; primaries return themselves."""
        if node.type is not NodeType.ALIAS:
            return node
        target = self.nodes.get(node.target or "")
        if target is None:
            raise OrphanNode(f"alias {node.id}: dangling target {node.target!r}")
        return target

    def primary_nodes(self) -> list[KnowledgeNode]:
        return sorted((n for n in self.nodes.values() if n.type in PRIMARY_TYPES),
                      key=lambda n: n.id)

    def logical_edges(self) -> set[tuple[str, str]]:
        return {(n.parent, n.id) for n in self.nodes.values() if n.parent}

    def associative_edges(self) -> set[tuple[str, str]]:
        return {(n.id, n.target) for n in self.nodes.values()
                if n.type is NodeType.ALIAS and n.target}

    # --- persistence -------------------------------------------------------------

    def export_jsonl(self, nodes_path: str | Path, edges_path: str | Path) -> None:
        nodes_path, edges_path = Path(nodes_path), Path(edges_path)
        node_lines = [json.dumps(self.nodes[nid].to_json(), sort_keys=True)
                      for nid in sorted(self.nodes)]
        nodes_path.write_text("\n".join(node_lines) + ("\n" if node_lines else ""),
                              encoding="utf-8")
        edges = ([{"kind": "logical", "from": a, "to": b}
                  for a, b in sorted(self.logical_edges())]
                 + [{"kind": "associative", "from": a, "to": b}
                    for a, b in sorted(self.associative_edges())])
        edge_lines = [json.dumps(e, sort_keys=True) for e in edges]
        edges_path.write_text("\n".join(edge_lines) + ("\n" if edge_lines else ""),
                              encoding="utf-8")

    @staticmethod
    def import_jsonl(nodes_path: str | Path) -> "KnowledgeGraph":
        graph = KnowledgeGraph()
        pending = []
        for line in Path(nodes_path).read_text(encoding="utf-8").splitlines():
            if line.strip():
                pending.append(KnowledgeNode.from_json(json.loads(line)))
        # worklist insert: a node waits until its parent/target exists
        while pending:
            progressed = False
            deferred = []
            for node in pending:
                parent_ready = node.parent is None or node.parent in graph.nodes
                target_ready = node.type is not NodeType.ALIAS or \
                    (node.target in graph.nodes)
                if parent_ready and target_ready:
                    graph.add_node(node)
                    progressed = True
                else:
                    deferred.append(node)
            if not progressed:
                broken = ", ".join(n.id for n in deferred[:5])
                raise OrphanNode(f"unresolvable parents/targets for: {broken}")
            pending = deferred
        return graph


# --- deterministic ids ---------------------------------------------------------

def database_id(database: str) -> str:
    return f"db:{database}"


def table_id(database: str, table: str) -> str:
    return f"tbl:{database}.{table}"


def column_id(database: str, table: str, column: str) -> str:
    return f"col:{database}.{table}.{column}"


def value_id(database: str, table: str, column: str, value: str) -> str:
    return f"val:{database}.{table}.{column}={value}"


def jargon_id(term: str) -> str:
    return f"jargon:{term}"


def alias_id(name: str, target: str) -> str:
    return f"alias:{name}->{target}"


# --- upsert ----------------------------------------------------------------------

def upsert_knowledge(graph: KnowledgeGraph,
                     payload: KnowledgeBundle | list[dict],
                     ) -> KnowledgeGraph:
    """Fold a knowledge bundle or glossary entries into the graph,
    idempotently.

    Bundles create database/table/column/value nodes plus derived-column
    nodes (tagged ``derived`` with their calculation logic) and alias nodes.
    Glossary entries ({term, description, aliases?}) create jargon nodes.
    """
    if isinstance(payload, KnowledgeBundle):
        _upsert_bundle(graph, payload)
    else:
        _upsert_glossary(graph, payload)
    return graph


def _upsert_bundle(graph: KnowledgeGraph, bundle: KnowledgeBundle) -> None:
    db_id = database_id(bundle.database_name)
    graph.add_node(KnowledgeNode(id=db_id, type=NodeType.DATABASE,
                                 name=bundle.database_name,
                                 components=dict(bundle.database)))
    tbl_id = table_id(bundle.database_name, bundle.table_name)
    graph.add_node(KnowledgeNode(id=tbl_id, type=NodeType.TABLE,
                                 name=bundle.table_name,
                                 components=dict(bundle.table), parent=db_id))
    for name, knowledge in sorted(bundle.columns.items()):
        col_id = column_id(bundle.database_name, bundle.table_name, name)
        graph.add_node(KnowledgeNode(
            id=col_id, type=NodeType.COLUMN, name=name, parent=tbl_id,
            components={"description": knowledge.description,
                        "usage": knowledge.usage, "type": knowledge.type,
                        "tags": list(knowledge.tags)}))
        for value in knowledge.values:
            graph.add_node(KnowledgeNode(
                id=value_id(bundle.database_name, bundle.table_name, name, value),
                type=NodeType.VALUE, name=value, parent=col_id,
                components={"description": f"value of {name}"}))
        for alias in knowledge.aliases:
            graph.add_node(KnowledgeNode(
                id=alias_id(alias, col_id), type=NodeType.ALIAS, name=alias,
                components={}, target=col_id))
        for derived in knowledge.derived:
            derived_col_id = column_id(bundle.database_name, bundle.table_name,
                                       derived.name)
            graph.add_node(KnowledgeNode(
                id=derived_col_id, type=NodeType.COLUMN, name=derived.name,
                parent=tbl_id,
                components={"description": derived.description,
                            "usage": derived.usage,
                            "calculation_logic": derived.calculation_logic,
                            "related_columns": list(derived.related_columns),
                            "tags": sorted(set(derived.tags) | {"derived"})}))


def _upsert_glossary(graph: KnowledgeGraph, entries: list[dict]) -> None:
    for entry in entries:
        term = entry["term"]
        node_id = jargon_id(term)
        graph.add_node(KnowledgeNode(
            id=node_id, type=NodeType.JARGON, name=term,
            components={"description": entry.get("description", ""),
                        "usage": entry.get("usage", "")}))
        for alias in entry.get("aliases", []):
            graph.add_node(KnowledgeNode(
                id=alias_id(alias, node_id), type=NodeType.ALIAS, name=alias,
                components={}, target=node_id))
