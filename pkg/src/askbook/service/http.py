"""HTTP surface over sessions, notebooks, and the knowledge graph.

JSON bodies throughout; engine errors map to 4xx payloads carrying the
pipeline stage they occurred in. Optional static-token auth via the
X-Askbook-Token header.
"""

from __future__ import annotations

import json
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, Response

from ..context.retrieve import QueryScope, TaskType
from ..errors import (
    AskbookError,
    BindError,
    MalformedDocument,
    NoPendingSuggestion,
    PendingSuggestion,
    StageError,
    UnknownCell,
    UnknownVariable,
)
from ..gateway import Gateway, ReplayFixture, ScriptedProvider
from ..knowledge.dsl import dsl_to_sql, dsl_to_vis, translate_to_dsl
from ..knowledge.generate import (
    map_generate,
    preprocess_scripts,
    reduce_synthesize,
)
from ..knowledge.graph import upsert_knowledge
from ..knowledge.retrieve import coarse_retrieve, fine_order, rewrite_query
from ..knowledge.types import LineageInfo, SchemaInfo, Script, ScriptHistory
from ..notebook import Cell, parse_notebook, serialize_notebook
from ..errors import UnchartableSpec
from .config import Config
from .session import SessionManager
from .store import GraphStore, NotebookStore

_STATUS = {
    MalformedDocument: 400,
    PendingSuggestion: 409,
    NoPendingSuggestion: 409,
    UnknownCell: 404,
    UnknownVariable: 404,
}


def build_gateway(config: Config) -> Gateway:
    if config.provider == "scripted":
        return Gateway(ScriptedProvider(ReplayFixture.load(config.fixtures_dir)))
    from ..gateway.live import LiveProvider
    return Gateway(LiveProvider())


def create_app(config: Config, manager: SessionManager | None = None) -> FastAPI:
    app = FastAPI(title="askbook", version="0.1.0")
    store = manager.store if manager else NotebookStore(config.store_dir)
    graph_store = GraphStore(config.store_dir)
    if manager is None:
        manager = SessionManager(config, store, build_gateway(config))
        manager.set_graph(graph_store.load())
    app.state.manager = manager
    app.state.graph_store = graph_store
    app.state.config = config

    @app.middleware("http")
    async def auth(request: Request, call_next):
        token = config.auth_token
        if token and request.url.path != "/health":
            if request.headers.get("x-askbook-token") != token:
                return JSONResponse({"error": "Unauthorized"}, status_code=401)
        return await call_next(request)

    @app.exception_handler(AskbookError)
    async def engine_error(request: Request, exc: AskbookError):
        stage = getattr(exc, "stage", None)
        cause = getattr(exc, "cause", exc)
        status = _STATUS.get(type(cause), 400)
        return JSONResponse(
            {"error": type(cause).__name__, "stage": stage, "message": str(cause)},
            status_code=status)

    # --- basics ------------------------------------------------------------------

    @app.get("/health")
    def health() -> dict[str, Any]:
        revisions = {nb_id: store.load(nb_id).revision for nb_id in store.ids()}
        return {"status": "ok", "revisions": revisions}

    @app.get("/metrics")
    def metrics() -> dict[str, Any]:
        return {"tokens": manager.gateway.token_report()}

    # --- notebooks ------------------------------------------------------------------

    @app.get("/notebooks/{nb_id}")
    def get_notebook(nb_id: str) -> Response:
        nb = store.load(nb_id)
        return Response(content=serialize_notebook(nb),
                        media_type="application/json")

    @app.put("/notebooks/{nb_id}")
    async def put_notebook(nb_id: str, request: Request) -> dict[str, Any]:
        nb = parse_notebook(await request.body())
        if nb.id != nb_id:
            raise MalformedDocument("document id does not match URL")
        store.put_document(nb)
        return {"id": nb.id, "revision": nb.revision}

    # --- sessions -------------------------------------------------------------------

    @app.post("/sessions")
    async def create_session(request: Request) -> dict[str, Any]:
        body = await request.json()
        session = manager.create_session(
            body["notebook_id"], table_name=body.get("table_name", "data"),
            rows=body.get("rows", []))
        return {"session_id": session.id}

    @app.post("/sessions/{session_id}/ask")
    async def ask(session_id: str, request: Request) -> dict[str, Any]:
        body = await request.json()
        session = manager.get_session(session_id)
        scope_raw = body.get("scope", {})
        scope = QueryScope(
            level=scope_raw.get("level", "notebook"),
            anchor_cell=scope_raw.get("anchor_cell"),
            data_variable=scope_raw.get("data_variable"),
            task_type=TaskType(scope_raw.get("task_type", "Other")))
        suggestion = manager.ask(session, body["query"], scope)
        return {"pending": True, **suggestion.to_json()}

    @app.post("/sessions/{session_id}/resolve")
    async def resolve(session_id: str, request: Request) -> dict[str, Any]:
        body = await request.json()
        session = manager.get_session(session_id)
        cells = None
        if body.get("cells") is not None:
            cells = [Cell.from_json(c) for c in body["cells"]]
        revision = manager.resolve(session, body["decision"], cells)
        return {"revision": revision}

    @app.get("/sessions/{session_id}/dag")
    def session_dag(session_id: str) -> dict[str, Any]:
        return manager.get_session(session_id).dag.to_json()

    # --- knowledge -------------------------------------------------------------------

    @app.get("/kg/query")
    def kg_query(q: str, task: str = "nl2dsl") -> dict[str, Any]:
        indexes = manager.ensure_indexes()
        if indexes is None:
            return {"topk": [], "dsl": None, "sql": None, "chart": None}
        rewritten = rewrite_query(q, [], config.now or "2024-01-01",
                                  manager.gateway)
        candidates = coarse_retrieve(rewritten, manager.graph, config.retrieval,
                                     indexes, manager.gateway)
        top = fine_order(rewritten, candidates, config.retrieval,
                         manager.gateway, indexes=indexes)
        out: dict[str, Any] = {
            "topk": [{"id": s.node.id, "name": s.node.name,
                      "type": s.node.type.value, "score": s.score}
                     for s in top],
            "dsl": None, "sql": None, "chart": None}
        try:
            spec = translate_to_dsl(rewritten, top, manager.gateway)
            out["dsl"] = spec.to_json()
            out["sql"] = dsl_to_sql(spec, "data")
            try:
                out["chart"] = dsl_to_vis(spec)
            except UnchartableSpec:
                out["chart"] = None
        except AskbookError:
            pass
        return out

    @app.post("/kg/generate")
    async def kg_generate(request: Request) -> dict[str, Any]:
        body = await request.json()
        schema = SchemaInfo.from_json(body["schema"])
        history = ScriptHistory(
            scripts=tuple(Script.from_json(s) for s in body["scripts"]),
            table_ref=schema.table)
        lineage = LineageInfo.from_json(body.get("lineage", []))
        surviving = preprocess_scripts(history, config.gen)
        drafts = [map_generate(script, schema, lineage, config.gen,
                               manager.gateway).bundle
                  for script in surviving.scripts]
        bundle = reduce_synthesize(drafts, schema, lineage, manager.gateway) \
            if drafts else None
        if bundle is None:
            return {"bundle": None}
        upsert_knowledge(manager.graph, bundle)
        manager.indexes = None
        graph_store.save(manager.graph)
        return {"bundle": bundle.to_json()}

    return app


def serve(config: Config) -> None:
    """Run the HTTP service until interrupted; flushes stores on shutdown."""
    import uvicorn
    app = create_app(config)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    except OSError as exc:
        raise BindError(f"cannot bind {config.host}:{config.port}: {exc}") from exc
