"""Replay scenarios: fully scripted ask/resolve runs with deterministic
artifacts.

A scenario file bundles a notebook, an attached fixture table, a query and
scope, scripted gateway responses (per-tag queues and/or fingerprint
fixtures), and optional knowledge setup. Running one produces canonical
artifacts (trace JSONL, accepted notebook bytes, buffer snapshot, token
report) that byte-compare across runs, which is what the replay-determinism
gate checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from ..context.retrieve import QueryScope, TaskType
from ..gateway import Gateway, ReplayFixture, ScriptedProvider, SequenceProvider
from ..knowledge.generate import validate_bundle
from ..knowledge.graph import KnowledgeGraph, upsert_knowledge
from ..knowledge.types import SchemaInfo
from ..notebook import Notebook, parse_notebook, serialize_notebook
from .config import Config
from .session import SessionManager, Suggestion
from .store import NotebookStore


@dataclass
class ScenarioResult:
    name: str
    suggestion: Suggestion
    notebook_after: Notebook
    buffer_snapshot: dict[str, Any]
    token_report: dict[str, dict[str, int]]
    states: dict[str, str]

    def artifacts(self) -> dict[str, bytes]:
        """Canonical byte artifacts keyed by filename."""
        trace = "\n".join(json.dumps(e.to_json(), sort_keys=True)
                          for e in self.suggestion.trace) + "\n"
        return {
            "trace.jsonl": trace.encode("utf-8"),
            "notebook.dlnb.json": serialize_notebook(self.notebook_after),
            "buffer.json": (json.dumps(self.buffer_snapshot, sort_keys=True,
                                       indent=1) + "\n").encode("utf-8"),
            "tokens.json": (json.dumps(self.token_report, sort_keys=True,
                                       indent=1) + "\n").encode("utf-8"),
            "answer.txt": (self.suggestion.answer + "\n").encode("utf-8"),
        }


def _gateway_from_spec(spec: dict[str, Any], base_dir: Path | None) -> Gateway:
    tags = spec.get("tags")
    embeddings: dict[str, list[float]] = {}
    fixtures_ref = spec.get("fixtures_dir")
    if fixtures_ref and base_dir is not None:
        fixture = ReplayFixture.load(base_dir / fixtures_ref)
        if tags is None:
            return Gateway(ScriptedProvider(fixture))
        embeddings = fixture.embeddings
    return Gateway(SequenceProvider(tags or {}, embeddings=embeddings))


def load_scenario(source: str | Path | dict[str, Any]) -> tuple[dict[str, Any], Path | None]:
    if isinstance(source, (str, Path)):
        path = Path(source)
        return json.loads(path.read_text(encoding="utf-8")), path.parent
    return dict(source), None


def run_scenario(source: str | Path | dict[str, Any],
                 store_dir: str | Path | None = None,
                 decision: str = "accept") -> ScenarioResult:
    """Execute one scenario end to end: ask, then resolve with ``decision``."""
    raw, base_dir = load_scenario(source)
    name = raw.get("name", "scenario")
    import tempfile
    store_path = Path(store_dir) if store_dir else \
        Path(tempfile.mkdtemp(prefix="askbook_scenario_"))
    store = NotebookStore(store_path)

    nb = parse_notebook(json.dumps(raw["notebook"]).encode("utf-8"))
    store.put_document(nb)

    config = Config(store_dir=str(store_path), provider="scripted",
                    fixtures_dir=".", now=raw.get("now", "2024-06-01"),
                    retrieval=_retrieval_config(raw))
    gateway = _gateway_from_spec(raw.get("gateway", {}), base_dir)
    manager = SessionManager(config, store, gateway)

    if "knowledge_bundle" in raw:
        schema = SchemaInfo.from_json(raw["schema"])
        bundle = validate_bundle(raw["knowledge_bundle"], schema)
        graph = upsert_knowledge(KnowledgeGraph(), bundle)
        if "glossary" in raw:
            upsert_knowledge(graph, raw["glossary"])
        manager.set_graph(graph)

    session = manager.create_session(nb.id, table_name=raw.get("table_name", "data"),
                                     rows=raw.get("rows", []),
                                     session_id=f"scenario_{name}")
    scope_raw = raw.get("scope", {})
    scope = QueryScope(level=scope_raw.get("level", "notebook"),
                       anchor_cell=scope_raw.get("anchor_cell"),
                       data_variable=scope_raw.get("data_variable"),
                       task_type=TaskType(scope_raw.get("task_type", "Other")))
    suggestion = manager.ask(session, raw["query"], scope)
    manager.resolve(session, decision)
    notebook_after = store.load(nb.id)
    return ScenarioResult(
        name=name,
        suggestion=suggestion,
        notebook_after=notebook_after,
        buffer_snapshot=session.buffer.snapshot(),
        token_report=gateway.token_report(),
        states={a: s.value for a, s in sorted(_final_states(suggestion).items())},
    )


def _final_states(suggestion: Suggestion):
    from ..agents.plan import AgentState
    states: dict[str, AgentState] = {}
    for event in suggestion.trace:
        if event.event == "state" and event.agent != "proxy":
            states[event.agent] = AgentState(event.state)
    return states


def _retrieval_config(raw: dict[str, Any]):
    from ..knowledge.retrieve import RetrievalConfig
    spec = raw.get("retrieval", {})
    return RetrievalConfig(
        weights=tuple(spec.get("weights", (0.5, 0.5, 0.0))),
        top_k=spec.get("top_k", 20),
        coarse_threshold=spec.get("coarse_threshold", 0.15))
