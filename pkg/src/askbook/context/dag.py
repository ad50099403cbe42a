"""Cell dependency DAG: construction and incremental maintenance.

Two passes build the graph. Pass one scans every cell for the variables it
defines, keeping every definition site in document order (``var_defs``). Pass
two resolves each cell's referenced names to the nearest *preceding*
definition, which keeps the graph acyclic even when a variable is redefined.

Updates are incremental: a change re-scans only the touched cell, then reruns
the cheap resolution pass over cached scans, so the result is always equal to
a from-scratch build of the post-edit notebook. Cells that fail the syntax
check are skipped and listed in ``diagnostics``; an update whose cell fails
the check raises and leaves the DAG untouched.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import CellSyntaxError, UnknownCell
from ..notebook import CellChange, Notebook
from .scan import CellScan, scan_cell


@dataclass(frozen=True)
class CellDAG:
    """Immutable dependency graph snapshot over notebook cells.

    edges are (definer, user) pairs; ``var_defs`` maps each variable to its
    ordered definition sites as (cell id, document position).
    """

    order: tuple[str, ...]
    scans: dict[str, CellScan] = field(default_factory=dict)
    edges: frozenset[tuple[str, str]] = frozenset()
    var_defs: dict[str, tuple[tuple[str, int], ...]] = field(default_factory=dict)
    diagnostics: dict[str, str] = field(default_factory=dict)

    @property
    def nodes(self) -> set[str]:
        return set(self.order)

    def position(self, cell_id: str) -> int:
        try:
            return self.order.index(cell_id)
        except ValueError:
            raise UnknownCell(f"cell {cell_id!r} not in DAG") from None

    def defining_cell(self, variable: str) -> str | None:
        """Cell holding the first definition of ``variable``, if any."""
        sites = self.var_defs.get(variable)
        return sites[0][0] if sites else None

    def to_json(self) -> dict:
        return {
            "nodes": list(self.order),
            "edges": sorted([list(e) for e in self.edges]),
            "var_defs": {v: [list(site) for site in sites]
                         for v, sites in sorted(self.var_defs.items())},
            "diagnostics": dict(sorted(self.diagnostics.items())),
        }


def _resolve(order: tuple[str, ...], scans: dict[str, CellScan],
             ) -> tuple[frozenset[tuple[str, str]], dict[str, tuple[tuple[str, int], ...]]]:
    """Resolution pass: definition table plus nearest-preceding-definition
    edges. Pure function of (order, scans)."""
    var_defs: dict[str, list[tuple[str, int]]] = {}
    for pos, cell_id in enumerate(order):
        scan = scans.get(cell_id)
        if scan is None:
            continue
        for var in sorted(scan.defined):
            var_defs.setdefault(var, []).append((cell_id, pos))

    edges: set[tuple[str, str]] = set()
    for pos, cell_id in enumerate(order):
        scan = scans.get(cell_id)
        if scan is None:
            continue
        for var in scan.referenced:
            nearest: str | None = None
            for def_cell, def_pos in var_defs.get(var, ()):
                if def_pos < pos:
                    nearest = def_cell
                else:
                    break
            if nearest is not None:
                edges.add((nearest, cell_id))

    frozen = {v: tuple(sites) for v, sites in var_defs.items()}
    return frozenset(edges), frozen


def build_dag(nb: Notebook) -> CellDAG:
    """Scan every cell and construct the dependency DAG.

    Syntax-failing cells become isolated nodes recorded in diagnostics;
    the build itself never raises for them.
    """
    scans: dict[str, CellScan] = {}
    diagnostics: dict[str, str] = {}
    for cell in nb.cells:
        try:
            scans[cell.id] = scan_cell(cell)
        except CellSyntaxError as exc:
            diagnostics[cell.id] = str(exc)
    order = tuple(c.id for c in nb.cells)
    edges, var_defs = _resolve(order, scans)
    return CellDAG(order=order, scans=scans, edges=edges,
                   var_defs=var_defs, diagnostics=diagnostics)


def update_dag(dag: CellDAG, change: CellChange) -> CellDAG:
    """Apply one cell change incrementally.

    Equals ``build_dag`` on the post-edit notebook. A create/modify whose cell
    fails the syntax check raises CellSyntaxError and the input DAG stays the
    graph of record.
    """
    order = list(dag.order)
    scans = dict(dag.scans)
    diagnostics = dict(dag.diagnostics)

    if change.kind == "delete":
        if change.cell_id not in dag.order:
            raise UnknownCell(f"cell {change.cell_id!r} not in DAG")
        order.remove(change.cell_id)
        scans.pop(change.cell_id, None)
        diagnostics.pop(change.cell_id, None)
    elif change.kind in ("create", "modify"):
        if change.cell is None:
            raise UnknownCell(f"{change.kind} change carries no cell")
        scan = scan_cell(change.cell)   # raises CellSyntaxError; DAG unchanged
        if change.kind == "create":
            index = max(0, min(change.index, len(order)))
            order.insert(index, change.cell_id)
        elif change.cell_id not in dag.order:
            raise UnknownCell(f"cell {change.cell_id!r} not in DAG")
        scans[change.cell_id] = scan
        diagnostics.pop(change.cell_id, None)
    else:
        raise UnknownCell(f"unknown change kind {change.kind!r}")

    new_order = tuple(order)
    edges, var_defs = _resolve(new_order, scans)
    return CellDAG(order=new_order, scans=scans, edges=edges,
                   var_defs=var_defs, diagnostics=diagnostics)


def ancestors(dag: CellDAG, cell_id: str) -> set[str]:
    """Transitive definers of ``cell_id`` (cells it depends on)."""
    if cell_id not in dag.nodes:
        raise UnknownCell(f"cell {cell_id!r} not in DAG")
    incoming: dict[str, set[str]] = {}
    for src, dst in dag.edges:
        incoming.setdefault(dst, set()).add(src)
    seen: set[str] = set()
    frontier = [cell_id]
    while frontier:
        current = frontier.pop()
        for parent in incoming.get(current, ()):
            if parent not in seen:
                seen.add(parent)
                frontier.append(parent)
    return seen


def descendants(dag: CellDAG, cell_id: str) -> set[str]:
    """Transitive users of ``cell_id`` (cells that depend on it)."""
    if cell_id not in dag.nodes:
        raise UnknownCell(f"cell {cell_id!r} not in DAG")
    outgoing: dict[str, set[str]] = {}
    for src, dst in dag.edges:
        outgoing.setdefault(src, set()).add(dst)
    seen: set[str] = set()
    frontier = [cell_id]
    while frontier:
        current = frontier.pop()
        for child in outgoing.get(current, ()):
            if child not in seen:
                seen.add(child)
                frontier.append(child)
    return seen


def topo_order(dag: CellDAG) -> list[str]:
    """Topological order of the graph; raises ValueError on a cycle (which
    construction makes impossible, so this doubles as a sanity check)."""
    indegree = {node: 0 for node in dag.order}
    for _, dst in dag.edges:
        indegree[dst] += 1
    ready = [node for node in dag.order if indegree[node] == 0]
    out: list[str] = []
    outgoing: dict[str, list[str]] = {}
    for src, dst in sorted(dag.edges):
        outgoing.setdefault(src, []).append(dst)
    while ready:
        node = ready.pop(0)
        out.append(node)
        for child in outgoing.get(node, ()):
            indegree[child] -= 1
            if indegree[child] == 0:
                ready.append(child)
    if len(out) != len(dag.order):
        raise ValueError("dependency graph contains a cycle")
    return out
