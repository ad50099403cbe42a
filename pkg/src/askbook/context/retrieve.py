"""Minimum relevant-cell retrieval for a query over the dependency DAG.

Cell-level queries walk the anchor's ancestors; notebook-level queries locate
the first definition of the scoped data variable and walk its descendants.
The traversal set is pruned by task type, then Markdown cells whose text is
similar enough to the query join the bundle (they carry no variables, so
similarity is their only way in, and it bypasses type pruning). Buffer units
ride along when their data source is a variable some bundle cell defines.

The whole operation is a pure function of (dag, notebook, scope, query,
buffer contents): same inputs, same bundle.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from math import sqrt

from ..agents.units import InformationUnit, SharedBuffer
from ..errors import UnknownCell, UnknownVariable
from ..gateway import Gateway
from ..notebook import Cell, CellKind, Notebook
from .dag import CellDAG, ancestors, descendants

DEFAULT_SIMILARITY_THRESHOLD = 0.25

_WORD_RE = re.compile(r"[a-z0-9_]+")


class TaskType(str, Enum):
    NL2SQL = "NL2SQL"
    NL2DSCODE = "NL2DSCode"
    NL2VIS = "NL2VIS"
    NL2INSIGHT = "NL2Insight"
    OTHER = "Other"


# Cell kinds each task keeps from the traversal set. Insight and Other keep
# everything; the scoped defining cell survives regardless.
_TASK_KEEP: dict[TaskType, frozenset[CellKind] | None] = {
    TaskType.NL2DSCODE: frozenset({CellKind.PYTHON}),
    TaskType.NL2SQL: frozenset({CellKind.SQL}),
    TaskType.NL2VIS: frozenset({CellKind.SQL, CellKind.PYTHON, CellKind.CHART}),
    TaskType.NL2INSIGHT: None,
    TaskType.OTHER: None,
}


@dataclass(frozen=True)
class QueryScope:
    level: str                       # "cell" | "notebook"
    anchor_cell: str | None = None
    data_variable: str | None = None
    task_type: TaskType = TaskType.OTHER

    def __post_init__(self) -> None:
        if self.level not in ("cell", "notebook"):
            raise ValueError(f"unknown scope level {self.level!r}")
        if self.level == "cell" and not self.anchor_cell:
            raise ValueError("cell-level scope requires anchor_cell")


@dataclass(frozen=True)
class ContextBundle:
    cells: tuple[Cell, ...]
    units: tuple[InformationUnit, ...]
    token_estimate: int

    def to_json(self) -> dict:
        return {"cells": [c.to_json() for c in self.cells],
                "units": [u.to_json() for u in self.units],
                "token_estimate": self.token_estimate}


def _words(text: str) -> set[str]:
    return set(_WORD_RE.findall(text.lower()))


def markdown_similarity(text: str, query: str) -> float:
    """Token-overlap cosine over lowercased word sets, in [0, 1]."""
    a, b = _words(text), _words(query)
    if not a or not b:
        return 0.0
    return len(a & b) / sqrt(len(a) * len(b))


def prune_by_task(cells: list[Cell], task: TaskType | str,
                  keep: str | set[str] | None = None) -> list[Cell]:
    """Filter cells to the kinds relevant for ``task``, preserving order.
    Cells named in ``keep`` (the scoped variable's definer, the anchor)
    always stay."""
    task = TaskType(task)
    kinds = _TASK_KEEP[task]
    if kinds is None:
        return list(cells)
    protected = {keep} if isinstance(keep, str) else (keep or set())
    return [c for c in cells if c.kind in kinds or c.id in protected]


def _predict_variable(query: str, dag: CellDAG, gateway: Gateway | None) -> str:
    candidates = sorted(dag.var_defs)
    if not candidates:
        raise UnknownVariable("notebook defines no data variables")
    if gateway is None:
        raise UnknownVariable(
            "notebook-level scope needs data_variable or a gateway to predict it")
    prompt = (
        "Pick the data variable this analytics query is about.\n"
        f"Known variables: {', '.join(candidates)}\n"
        f"Query: {query}\n"
        "Answer with exactly one variable name.")
    answer = gateway.complete(prompt, tag="context.predict_var").strip()
    for candidate in candidates:
        if candidate == answer or candidate in answer.split():
            return candidate
    raise UnknownVariable(f"predicted variable {answer!r} is not defined")


def retrieve_context(
    dag: CellDAG,
    nb: Notebook,
    scope: QueryScope,
    query: str,
    buffer: SharedBuffer | None = None,
    gateway: Gateway | None = None,
    similarity_threshold: float = DEFAULT_SIMILARITY_THRESHOLD,
) -> ContextBundle:
    """Assemble the minimum relevant cell set and its buffer units.

    Raises UnknownCell for a missing anchor and UnknownVariable when the
    scoped data variable is never defined (or cannot be predicted).
    """
    if scope.level == "cell":
        anchor = scope.anchor_cell or ""
        if anchor not in dag.nodes:
            raise UnknownCell(f"anchor cell {anchor!r} not in notebook")
        relevant = {anchor} | ancestors(dag, anchor)
        protected = {anchor}
        if scope.data_variable:
            definer = dag.defining_cell(scope.data_variable)
            if definer is not None:
                protected.add(definer)
    else:
        variable = scope.data_variable or _predict_variable(query, dag, gateway)
        start = dag.defining_cell(variable)
        if start is None:
            raise UnknownVariable(f"variable {variable!r} is never defined")
        relevant = {start} | descendants(dag, start)
        protected = {start}

    ordered = [c for c in nb.cells if c.id in relevant]
    kept = prune_by_task(ordered, scope.task_type, keep=protected)
    kept_ids = {c.id for c in kept}

    similar_md = {
        c.id for c in nb.cells
        if c.kind is CellKind.MARKDOWN and c.id not in kept_ids
        and markdown_similarity(c.source, query) >= similarity_threshold
    }
    bundle_cells = tuple(c for c in nb.cells if c.id in kept_ids | similar_md)

    bundle_vars: set[str] = set()
    for cell in bundle_cells:
        scan = dag.scans.get(cell.id)
        if scan is not None:
            bundle_vars |= scan.defined
        binding = cell.effective_binding()
        if binding:
            bundle_vars.add(binding)

    units: tuple[InformationUnit, ...] = ()
    if buffer is not None:
        units = tuple(u for u in buffer.live_units() if u.data_source in bundle_vars)

    chars = sum(len(c.source) for c in bundle_cells)
    chars += sum(len(u.description) + len(u.content.text()) for u in units)
    return ContextBundle(cells=bundle_cells, units=units, token_estimate=chars // 4)
