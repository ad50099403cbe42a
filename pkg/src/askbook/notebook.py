"""Multi-language notebook document: cells, edits, and the on-disk format.

A notebook is an ordered list of SQL / Python / Markdown / Chart cells. Values
are immutable snapshots: every edit produces a new ``Notebook`` with a higher
revision plus a ``CellChange`` event that the dependency-graph maintainer
consumes. The file format is UTF-8 JSON (``.dlnb.json``) with LF newlines;
unknown keys survive a parse/serialize round trip.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterator

from .errors import DuplicateId, MalformedDocument, UnknownCell

_CELL_KEY_ORDER = ("id", "kind", "source", "binding", "outputs", "syntax_ok")
_NOTEBOOK_KEY_ORDER = ("id", "revision", "cells")
_OUTPUT_KEY_ORDER = ("kind", "payload", "produced_at")


class CellKind(str, Enum):
    SQL = "sql"
    PYTHON = "python"
    MARKDOWN = "markdown"
    CHART = "chart"


class OutputKind(str, Enum):
    TEXT = "text"
    TABLE_PREVIEW = "table_preview"
    CHART_SPEC = "chart_spec"
    ERROR = "error"


@dataclass(frozen=True)
class Output:
    """One execution output attached to a cell.

    ``produced_at`` is logical time (a run-scoped counter), which keeps
    replayed documents byte-identical across runs.
    """

    kind: OutputKind
    payload: Any
    produced_at: int = 0

    def __post_init__(self) -> None:
        if self.kind is OutputKind.ERROR and not self.payload:
            raise MalformedDocument("error output carries an empty message")

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "payload": self.payload,
                "produced_at": self.produced_at}

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "Output":
        try:
            kind = OutputKind(obj["kind"])
        except (KeyError, ValueError) as exc:
            raise MalformedDocument(f"bad output entry: {exc}") from exc
        return Output(kind=kind, payload=obj.get("payload"),
                      produced_at=int(obj.get("produced_at", 0)))


@dataclass(frozen=True)
class Cell:
    """A single notebook cell.

    ``binding`` names the data variable a SQL cell's result set is stored
    under, or the variable a Chart cell renders. SQL cells without an explicit
    binding get the deterministic default ``sql_result_<cell_id>``; see
    :meth:`effective_binding`.
    """

    id: str
    kind: CellKind
    source: str = ""
    binding: str | None = None
    outputs: tuple[Output, ...] = ()
    syntax_ok: bool = True
    extra: dict[str, Any] = field(default_factory=dict, compare=True)

    def __post_init__(self) -> None:
        if not self.id:
            raise MalformedDocument("cell id must be a nonempty string")
        if self.binding is not None and self.kind not in (CellKind.SQL, CellKind.CHART):
            raise MalformedDocument(
                f"cell {self.id!r}: binding is only valid on sql/chart cells")
        if self.kind is CellKind.MARKDOWN and self.outputs:
            raise MalformedDocument(f"markdown cell {self.id!r} cannot carry outputs")

    def effective_binding(self) -> str | None:
        """Variable this cell stores its result under, default applied."""
        if self.kind is CellKind.SQL:
            return self.binding or f"sql_result_{self.id}"
        return self.binding

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"id": self.id, "kind": self.kind.value,
                               "source": self.source}
        if self.binding is not None:
            obj["binding"] = self.binding
        if self.outputs:
            obj["outputs"] = [o.to_json() for o in self.outputs]
        if not self.syntax_ok:
            obj["syntax_ok"] = False
        obj.update(self.extra)
        return obj

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "Cell":
        if not isinstance(obj, dict):
            raise MalformedDocument("cell entry is not an object")
        for key in ("id", "kind", "source"):
            if key not in obj:
                raise MalformedDocument(f"cell missing required field {key!r}")
        try:
            kind = CellKind(obj["kind"])
        except ValueError as exc:
            raise MalformedDocument(f"unknown cell kind {obj['kind']!r}") from exc
        binding = obj.get("binding")
        if binding is not None and not isinstance(binding, str):
            raise MalformedDocument(f"cell {obj['id']!r}: binding must be a string")
        outputs = tuple(Output.from_json(o) for o in obj.get("outputs", []))
        extra = {k: v for k, v in obj.items() if k not in _CELL_KEY_ORDER}
        return Cell(id=str(obj["id"]), kind=kind, source=str(obj["source"]),
                    binding=binding, outputs=outputs,
                    syntax_ok=bool(obj.get("syntax_ok", True)), extra=extra)


@dataclass(frozen=True)
class Notebook:
    """An immutable notebook snapshot. Cell order is document order."""

    id: str
    cells: tuple[Cell, ...] = ()
    revision: int = 0
    extra: dict[str, Any] = field(default_factory=dict, compare=True)

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for cell in self.cells:
            if cell.id in seen:
                raise MalformedDocument(f"duplicate cell id {cell.id!r}")
            seen.add(cell.id)

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.cells)

    def cell_ids(self) -> list[str]:
        return [c.id for c in self.cells]

    def get(self, cell_id: str) -> Cell:
        for cell in self.cells:
            if cell.id == cell_id:
                return cell
        raise UnknownCell(f"no cell {cell_id!r} in notebook {self.id!r}")

    def index_of(self, cell_id: str) -> int:
        for i, cell in enumerate(self.cells):
            if cell.id == cell_id:
                return i
        raise UnknownCell(f"no cell {cell_id!r} in notebook {self.id!r}")


@dataclass(frozen=True)
class CellChange:
    """Event describing one committed edit, consumed by the DAG maintainer."""

    kind: str                 # "create" | "modify" | "delete"
    cell_id: str
    cell: Cell | None         # post-edit cell (None for delete)
    index: int                # document position the change applies at
    revision: int             # notebook revision after the edit

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, "cell_id": self.cell_id,
                "cell": self.cell.to_json() if self.cell else None,
                "index": self.index, "revision": self.revision}

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "CellChange":
        cell = Cell.from_json(obj["cell"]) if obj.get("cell") else None
        return CellChange(kind=obj["kind"], cell_id=obj["cell_id"], cell=cell,
                          index=int(obj["index"]), revision=int(obj["revision"]))


@dataclass(frozen=True)
class Edit:
    """Requested mutation. ``index`` applies to create only (None = append)."""

    kind: str                 # "create" | "modify" | "delete"
    cell_id: str
    new_cell: Cell | None = None
    index: int | None = None


def parse_notebook(data: bytes | str) -> Notebook:
    """Decode UTF-8 JSON bytes into a Notebook.

    Raises MalformedDocument on bad JSON, missing required fields, duplicate
    cell ids, or invariant violations. Unknown keys at notebook and cell level
    are preserved for the round trip.
    """
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedDocument(f"document is not UTF-8: {exc}") from exc
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"document is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise MalformedDocument("top level is not an object")
    for key in ("id", "revision", "cells"):
        if key not in obj:
            raise MalformedDocument(f"missing required field {key!r}")
    if not isinstance(obj["cells"], list):
        raise MalformedDocument("cells must be a list")
    cells = tuple(Cell.from_json(c) for c in obj["cells"])
    extra = {k: v for k, v in obj.items() if k not in _NOTEBOOK_KEY_ORDER}
    return Notebook(id=str(obj["id"]), cells=cells,
                    revision=int(obj["revision"]), extra=extra)


def serialize_notebook(nb: Notebook) -> bytes:
    """Canonical UTF-8 JSON encoding: known keys first in schema order,
    unknown keys appended sorted, two-space indent, LF, trailing newline.

    parse_notebook(serialize_notebook(nb)) == nb.
    """
    obj: dict[str, Any] = {"id": nb.id, "revision": nb.revision,
                           "cells": [_ordered_cell(c) for c in nb.cells]}
    for key in sorted(nb.extra):
        obj[key] = nb.extra[key]
    text = json.dumps(obj, indent=2, ensure_ascii=False)
    return (text + "\n").encode("utf-8")


def _ordered_cell(cell: Cell) -> dict[str, Any]:
    raw = cell.to_json()
    ordered = {k: raw[k] for k in _CELL_KEY_ORDER if k in raw}
    for key in sorted(k for k in raw if k not in _CELL_KEY_ORDER):
        ordered[key] = raw[key]
    return ordered


def apply_edit(nb: Notebook, edit: Edit) -> tuple[Notebook, CellChange]:
    """Apply one edit, returning the new snapshot and its change event.

    The revision is incremented; modify never reorders cells. Raises
    UnknownCell for modify/delete of a missing id and DuplicateId when a
    create reuses an id.
    """
    if edit.kind == "create":
        if edit.new_cell is None:
            raise MalformedDocument("create edit requires new_cell")
        if edit.new_cell.id != edit.cell_id:
            raise MalformedDocument("edit cell_id does not match new_cell.id")
        if any(c.id == edit.cell_id for c in nb.cells):
            raise DuplicateId(f"cell id {edit.cell_id!r} already exists")
        index = len(nb.cells) if edit.index is None else max(0, min(edit.index, len(nb.cells)))
        cells = nb.cells[:index] + (edit.new_cell,) + nb.cells[index:]
    elif edit.kind == "modify":
        if edit.new_cell is None:
            raise MalformedDocument("modify edit requires new_cell")
        index = nb.index_of(edit.cell_id)
        if edit.new_cell.id != edit.cell_id:
            raise MalformedDocument("modify cannot change a cell's id")
        cells = nb.cells[:index] + (edit.new_cell,) + nb.cells[index + 1:]
    elif edit.kind == "delete":
        index = nb.index_of(edit.cell_id)
        cells = nb.cells[:index] + nb.cells[index + 1:]
    else:
        raise MalformedDocument(f"unknown edit kind {edit.kind!r}")

    new_nb = replace(nb, cells=cells, revision=nb.revision + 1)
    change = CellChange(kind=edit.kind, cell_id=edit.cell_id,
                        cell=edit.new_cell if edit.kind != "delete" else None,
                        index=index, revision=new_nb.revision)
    return new_nb, change
