"""Persistence: append-only change logs with periodic snapshots for
notebooks, JSONL node/edge files for knowledge graphs.

Every committed notebook mutation flows through apply_edit and lands as one
CellChange line in the notebook's event log, so the log doubles as the audit
trail. Reload replays events on top of the latest snapshot; a crash between
snapshot writes loses nothing.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from ..errors import MalformedDocument, UnknownCell
from ..notebook import (
    Cell,
    CellChange,
    Edit,
    Notebook,
    apply_edit,
    parse_notebook,
    serialize_notebook,
)

SNAPSHOT_EVERY = 20


def replay_change(nb: Notebook, change: CellChange) -> Notebook:
    """Re-apply a logged change; the log is authoritative on revisions."""
    if change.kind == "delete":
        nb2, _ = apply_edit(nb, Edit(kind="delete", cell_id=change.cell_id))
    elif change.kind == "create":
        nb2, _ = apply_edit(nb, Edit(kind="create", cell_id=change.cell_id,
                                     new_cell=change.cell, index=change.index))
    elif change.kind == "modify":
        nb2, _ = apply_edit(nb, Edit(kind="modify", cell_id=change.cell_id,
                                     new_cell=change.cell))
    else:
        raise MalformedDocument(f"unknown change kind {change.kind!r}")
    if nb2.revision != change.revision:
        raise MalformedDocument(
            f"event log out of sync: expected revision {change.revision}, "
            f"replay produced {nb2.revision}")
    return nb2


class NotebookStore:
    """One writer per notebook, enforced with per-notebook locks."""

    def __init__(self, directory: str | Path, snapshot_every: int = SNAPSHOT_EVERY):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.snapshot_every = snapshot_every
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def _lock_for(self, nb_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(nb_id, threading.Lock())

    def _snapshot_path(self, nb_id: str) -> Path:
        return self.directory / f"{nb_id}.snapshot.json"

    def _events_path(self, nb_id: str) -> Path:
        return self.directory / f"{nb_id}.events.jsonl"

    def exists(self, nb_id: str) -> bool:
        return self._snapshot_path(nb_id).exists() or self._events_path(nb_id).exists()

    def ids(self) -> list[str]:
        ids = {p.name[:-len(".snapshot.json")]
               for p in self.directory.glob("*.snapshot.json")}
        ids |= {p.name[:-len(".events.jsonl")]
                for p in self.directory.glob("*.events.jsonl")}
        return sorted(ids)

    def put_document(self, nb: Notebook) -> None:
        """Import a whole document: snapshot it and truncate the event log."""
        with self._lock_for(nb.id):
            self._write_snapshot(nb, event_count=0)
            self._events_path(nb.id).write_text("", encoding="utf-8")

    def load(self, nb_id: str) -> Notebook:
        with self._lock_for(nb_id):
            return self._load_unlocked(nb_id)

    def _load_unlocked(self, nb_id: str) -> Notebook:
        snapshot_path = self._snapshot_path(nb_id)
        replayed_from = 0
        if snapshot_path.exists():
            snapshot = json.loads(snapshot_path.read_text(encoding="utf-8"))
            nb = parse_notebook(snapshot["notebook"].encode("utf-8"))
            replayed_from = int(snapshot["event_count"])
        elif self._events_path(nb_id).exists():
            nb = Notebook(id=nb_id, revision=0)
        else:
            raise UnknownCell(f"no notebook {nb_id!r} in store")
        events_path = self._events_path(nb_id)
        if events_path.exists():
            lines = events_path.read_text(encoding="utf-8").splitlines()
            for line in lines[replayed_from:]:
                if line.strip():
                    nb = replay_change(nb, CellChange.from_json(json.loads(line)))
        return nb

    def apply(self, nb_id: str, edit: Edit) -> tuple[Notebook, CellChange]:
        """Commit one edit: apply, append to the log, snapshot periodically."""
        with self._lock_for(nb_id):
            nb = self._load_unlocked(nb_id)
            nb2, change = apply_edit(nb, edit)
            events_path = self._events_path(nb_id)
            with events_path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(change.to_json(), sort_keys=True) + "\n")
            event_count = sum(1 for line in
                              events_path.read_text(encoding="utf-8").splitlines()
                              if line.strip())
            if event_count % self.snapshot_every == 0:
                self._write_snapshot(nb2, event_count)
            return nb2, change

    def _write_snapshot(self, nb: Notebook, event_count: int) -> None:
        payload = {"notebook": serialize_notebook(nb).decode("utf-8"),
                   "event_count": event_count}
        tmp = self._snapshot_path(nb.id).with_suffix(".tmp")
        tmp.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
        tmp.replace(self._snapshot_path(nb.id))


class GraphStore:
    """Knowledge graphs as JSONL node/edge files, rewritten atomically."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def nodes_path(self, graph_id: str = "default") -> Path:
        return self.directory / f"{graph_id}.nodes.jsonl"

    def edges_path(self, graph_id: str = "default") -> Path:
        return self.directory / f"{graph_id}.edges.jsonl"

    def save(self, graph, graph_id: str = "default") -> None:
        with self._lock:
            tmp_nodes = self.nodes_path(graph_id).with_suffix(".tmp")
            tmp_edges = self.edges_path(graph_id).with_suffix(".tmp")
            graph.export_jsonl(tmp_nodes, tmp_edges)
            tmp_nodes.replace(self.nodes_path(graph_id))
            tmp_edges.replace(self.edges_path(graph_id))

    def load(self, graph_id: str = "default"):
        from ..knowledge.graph import KnowledgeGraph
        with self._lock:
            path = self.nodes_path(graph_id)
            if not path.exists():
                return KnowledgeGraph()
            return KnowledgeGraph.import_jsonl(path)
