"""Sessions: the human-in-the-loop ask/resolve cycle.

ask() runs the pipeline (rewrite -> knowledge retrieval -> context retrieval
-> plan -> dispatch) and stages the agents' outputs as proposed cells. No
notebook mutation happens until resolve(): accept commits the proposal
through apply_edit (updating the dependency DAG), edit commits user-modified
cells instead, reject discards the proposal and tombstones the plan's buffer
units. One pending suggestion per session, strictly.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field
from datetime import date
from typing import Any

from ..agents.dispatch import DispatchResult, dispatch
from ..agents.plan import plan as make_plan
from ..agents.tools import ToolRunner, default_tools
from ..agents.units import PayloadKind, SharedBuffer
from ..agents.workflow import AgentSpec, LogicalClock
from ..context.dag import CellDAG, build_dag, update_dag
from ..context.retrieve import ContextBundle, QueryScope, retrieve_context
from ..errors import (
    AskbookError,
    NoPendingSuggestion,
    PendingSuggestion,
    StageError,
)
from ..gateway import Gateway
from ..knowledge.dsl import dsl_to_sql, translate_to_dsl
from ..knowledge.graph import KnowledgeGraph
from ..knowledge.index import KnowledgeIndexes, build_indexes
from ..knowledge.retrieve import ScoredNode, coarse_retrieve, fine_order, rewrite_query
from ..notebook import Cell, CellKind, Edit, Notebook, Output, OutputKind
from .config import Config
from .store import NotebookStore


@dataclass
class Suggestion:
    cells: tuple[Cell, ...]
    answer: str
    trace: tuple
    unit_keys: frozenset[tuple[str, str, str]]
    token_report: dict[str, dict[str, int]] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"cells": [c.to_json() for c in self.cells],
                "answer": self.answer,
                "trace": [e.to_json() for e in self.trace]}


@dataclass
class Session:
    id: str
    notebook_id: str
    buffer: SharedBuffer
    dag: CellDAG
    clock: LogicalClock
    table_name: str = "data"
    rows: list[dict] = field(default_factory=list)
    history: list[str] = field(default_factory=list)
    pending: Suggestion | None = None
    puts_at_last_sweep: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


def _render_context(bundle: ContextBundle) -> str:
    lines = [f"[{c.kind.value} cell {c.id}] {c.source}" for c in bundle.cells]
    lines += [f"[unit {u.role}/{u.action}] {u.description}" for u in bundle.units]
    return "\n".join(lines) or "(empty)"


def _render_knowledge(nodes: list[ScoredNode]) -> str:
    lines = [f"- [{s.node.type.value}] {s.node.name}: "
             f"{s.node.components.get('description', '')}" for s in nodes]
    return "\n".join(lines) or "(none)"


class SessionManager:
    """Owns sessions, the knowledge graph, and the store; serializes
    mutations per session."""

    def __init__(self, config: Config, store: NotebookStore, gateway: Gateway,
                 registry: dict[str, AgentSpec] | None = None,
                 tools: ToolRunner | None = None,
                 graph: KnowledgeGraph | None = None):
        from ..agents.builtin import builtin_registry
        self.config = config
        self.store = store
        self.gateway = gateway
        self.registry = registry or builtin_registry()
        self.tools = tools or default_tools()
        self.graph = graph or KnowledgeGraph()
        self.indexes: KnowledgeIndexes | None = None
        self.sessions: dict[str, Session] = {}

    # --- knowledge -------------------------------------------------------------

    def set_graph(self, graph: KnowledgeGraph) -> None:
        self.graph = graph
        self.indexes = None

    def ensure_indexes(self) -> KnowledgeIndexes | None:
        if not self.graph.nodes:
            return None
        if self.indexes is None:
            self.indexes = build_indexes(self.graph, "default", self.gateway)
        return self.indexes

    # --- session lifecycle --------------------------------------------------------

    def create_session(self, notebook_id: str, table_name: str = "data",
                       rows: list[dict] | None = None,
                       session_id: str | None = None) -> Session:
        nb = self.store.load(notebook_id)
        session = Session(
            id=session_id or uuid.uuid4().hex[:12],
            notebook_id=notebook_id,
            buffer=SharedBuffer(capacity=self.config.buffer_capacity),
            dag=build_dag(nb),
            clock=LogicalClock(),
            table_name=table_name,
            rows=list(rows or []))
        self.sessions[session.id] = session
        return session

    def get_session(self, session_id: str) -> Session:
        session = self.sessions.get(session_id)
        if session is None:
            raise NoPendingSuggestion(f"unknown session {session_id!r}")
        return session

    # --- ask -------------------------------------------------------------------

    def _now(self) -> str:
        return self.config.now or date.today().isoformat()

    def ask(self, session: Session, query: str, scope: QueryScope) -> Suggestion:
        with session.lock:
            if session.pending is not None:
                raise PendingSuggestion(
                    "resolve the current suggestion before asking again")
            nb = self.store.load(session.notebook_id)

            try:
                rewritten = rewrite_query(query, session.history, self._now(),
                                          self.gateway)
            except AskbookError as exc:
                raise StageError("rewrite", exc) from exc

            try:
                top: list[ScoredNode] = []
                indexes = self.ensure_indexes()
                if indexes is not None:
                    candidates = coarse_retrieve(rewritten, self.graph,
                                                 self.config.retrieval, indexes,
                                                 self.gateway)
                    top = fine_order(rewritten, candidates,
                                     self.config.retrieval, self.gateway,
                                     indexes=indexes)
            except AskbookError as exc:
                raise StageError("knowledge", exc) from exc

            dsl_sql = ""
            if top:
                try:
                    spec = translate_to_dsl(rewritten, top, self.gateway)
                    dsl_sql = dsl_to_sql(spec, session.table_name)
                except AskbookError:
                    dsl_sql = ""     # hint only; agents can work without it

            try:
                bundle = retrieve_context(
                    session.dag, nb, scope, rewritten, session.buffer,
                    gateway=self.gateway,
                    similarity_threshold=self.config.similarity_threshold)
            except AskbookError as exc:
                raise StageError("context", exc) from exc

            try:
                comm_plan = make_plan(rewritten, scope, self.registry,
                                      self.gateway)
            except AskbookError as exc:
                raise StageError("plan", exc) from exc

            envelope = {
                "query": rewritten,
                "data_source": scope.data_variable or session.table_name,
                "table_name": session.table_name,
                "rows": session.rows,
                "knowledge": _render_knowledge(top),
                "context": _render_context(bundle),
                "dsl_sql": dsl_sql,
            }
            before_keys = {u.key for u in session.buffer.live_units()}
            try:
                result = dispatch(comm_plan, session.buffer, self.registry,
                                  self.gateway, self.tools, envelope,
                                  clock=session.clock)
            except AskbookError as exc:
                raise StageError("dispatch", exc) from exc

            produced = {u.key for u in session.buffer.live_units()} - before_keys
            suggestion = Suggestion(
                cells=self._materialize_cells(nb, scope, result),
                answer=result.answer,
                trace=result.trace,
                unit_keys=frozenset(produced),
                token_report=self.gateway.token_report())
            session.pending = suggestion
            session.history.append(rewritten)
            self._maybe_sweep(session)
            return suggestion

    def _maybe_sweep(self, session: Session) -> None:
        puts = session.buffer.put_count
        if puts - session.puts_at_last_sweep >= self.config.sweep_every:
            session.buffer.sweep()
            session.puts_at_last_sweep = puts

    def _materialize_cells(self, nb: Notebook, scope: QueryScope,
                           result: DispatchResult) -> tuple[Cell, ...]:
        """Turn the plan's produced units into proposed notebook cells."""
        existing = set(nb.cell_ids())
        cells: list[Cell] = []
        sql_binding: str | None = None
        counter = 0
        for unit in sorted(result.units, key=lambda u: u.timestamp):
            cell_id = f"q{nb.revision}_{counter}"
            while cell_id in existing:
                counter += 1
                cell_id = f"q{nb.revision}_{counter}"
            counter += 1
            kind = unit.content.kind
            if kind is PayloadKind.SQL:
                cell = Cell(id=cell_id, kind=CellKind.SQL,
                            source=str(unit.content.value))
                sql_binding = cell.effective_binding()
            elif kind is PayloadKind.CODE:
                cell = Cell(id=cell_id, kind=CellKind.PYTHON,
                            source=str(unit.content.value))
            elif kind is PayloadKind.CHART_SPEC:
                spec_json = json.dumps(unit.content.value, sort_keys=True,
                                       indent=2)
                cell = Cell(id=cell_id, kind=CellKind.CHART, source=spec_json,
                            binding=sql_binding or scope.data_variable,
                            outputs=(Output(OutputKind.CHART_SPEC,
                                            unit.content.value,
                                            produced_at=unit.timestamp),))
            elif kind is PayloadKind.TABLE_PREVIEW:
                continue   # intermediate data, not a cell
            else:
                cell = Cell(id=cell_id, kind=CellKind.MARKDOWN,
                            source=str(unit.content.value))
            existing.add(cell.id)
            cells.append(cell)
        return tuple(cells)

    # --- resolve -----------------------------------------------------------------

    def resolve(self, session: Session, decision: str,
                edited_cells: list[Cell] | None = None) -> int:
        """Commit or discard the pending suggestion; returns the notebook
        revision afterwards."""
        with session.lock:
            suggestion = session.pending
            if suggestion is None:
                raise NoPendingSuggestion("nothing to resolve")
            nb = self.store.load(session.notebook_id)
            if decision == "reject":
                session.pending = None
                session.buffer.supersede_where(
                    lambda u: u.key in suggestion.unit_keys)
                return nb.revision
            if decision == "edit":
                if edited_cells is None:
                    raise NoPendingSuggestion("edit decision requires cells")
                to_commit = tuple(edited_cells)
            elif decision == "accept":
                to_commit = suggestion.cells
            else:
                raise NoPendingSuggestion(f"unknown decision {decision!r}")

            revision = nb.revision
            for cell in to_commit:
                nb2, change = self.store.apply(
                    session.notebook_id,
                    Edit(kind="create", cell_id=cell.id, new_cell=cell))
                session.dag = update_dag(session.dag, change)
                revision = nb2.revision
            session.pending = None
            return revision
