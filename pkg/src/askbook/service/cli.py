"""Command-line interface: serve, one-shot ask, knowledge generation and
query, DAG inspection, context retrieval, and scenario replay."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from ..context.dag import build_dag
from ..context.retrieve import QueryScope, TaskType, retrieve_context
from ..errors import AskbookError
from ..gateway import Gateway, ReplayFixture, ScriptedProvider
from ..knowledge.generate import map_generate, preprocess_scripts, reduce_synthesize
from ..knowledge.graph import KnowledgeGraph
from ..knowledge.types import LineageInfo, SchemaInfo, Script, ScriptHistory
from ..notebook import parse_notebook
from .config import Config, load_config
from .scenario import run_scenario
from .store import NotebookStore


def _gateway(fixtures: str | None) -> Gateway:
    if fixtures:
        return Gateway(ScriptedProvider(ReplayFixture.load(fixtures)))
    from ..gateway.live import LiveProvider
    return Gateway(LiveProvider())


def _echo_json(obj) -> None:
    click.echo(json.dumps(obj, indent=2, sort_keys=True))


@click.group()
def main() -> None:
    """askbook: notebook BI agent engine."""


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True),
              required=True)
@click.option("--fixtures", type=click.Path(exists=True), default=None,
              help="force the scripted gateway with this fixtures dir")
def serve(config_path: str, fixtures: str | None) -> None:
    """Run the HTTP service."""
    from .http import serve as _serve
    cfg = load_config(config_path)
    if fixtures:
        cfg = Config(**{**cfg.__dict__, "provider": "scripted",
                        "fixtures_dir": fixtures})
    _serve(cfg)


@main.command()
@click.option("--notebook", type=click.Path(exists=True), required=True)
@click.option("--query", required=True)
@click.option("--level", type=click.Choice(["cell", "notebook"]),
              default="notebook")
@click.option("--anchor", default=None)
@click.option("--var", "variable", default=None)
@click.option("--task", default="Other")
@click.option("--fixtures", type=click.Path(exists=True), required=True)
@click.option("--table", default="data")
@click.option("--rows", "rows_path", type=click.Path(exists=True), default=None)
@click.option("--now", default="2024-06-01")
def ask(notebook: str, query: str, level: str, anchor: str | None,
        variable: str | None, task: str, fixtures: str, table: str,
        rows_path: str | None, now: str) -> None:
    """One-shot ask against a notebook file; prints the suggestion."""
    import tempfile
    from .session import SessionManager
    store = NotebookStore(tempfile.mkdtemp(prefix="askbook_ask_"))
    nb = parse_notebook(Path(notebook).read_bytes())
    store.put_document(nb)
    cfg = Config(store_dir=store.directory.as_posix(), provider="scripted",
                 fixtures_dir=fixtures, now=now)
    manager = SessionManager(cfg, store, _gateway(fixtures))
    rows = json.loads(Path(rows_path).read_text()) if rows_path else []
    session = manager.create_session(nb.id, table_name=table, rows=rows)
    scope = QueryScope(level=level, anchor_cell=anchor, data_variable=variable,
                       task_type=TaskType(task))
    suggestion = manager.ask(session, query, scope)
    _echo_json(suggestion.to_json())


@main.group()
def kg() -> None:
    """Knowledge generation and retrieval."""


@kg.command()
@click.option("--schema", "schema_path", type=click.Path(exists=True),
              required=True)
@click.option("--scripts", "scripts_path", type=click.Path(exists=True),
              required=True)
@click.option("--lineage", "lineage_path", type=click.Path(exists=True),
              default=None)
@click.option("--out", "out_path", type=click.Path(), required=True)
@click.option("--fixtures", type=click.Path(exists=True), required=True)
def generate(schema_path: str, scripts_path: str, lineage_path: str | None,
             out_path: str, fixtures: str) -> None:
    """Run map/reduce knowledge generation over a script history."""
    schema = SchemaInfo.from_json(json.loads(Path(schema_path).read_text()))
    scripts = tuple(Script.from_json(json.loads(line))
                    for line in Path(scripts_path).read_text().splitlines()
                    if line.strip())
    lineage_rows = []
    if lineage_path:
        lineage_rows = [json.loads(line) for line
                        in Path(lineage_path).read_text().splitlines()
                        if line.strip()]
    lineage = LineageInfo.from_json(lineage_rows)
    gateway = _gateway(fixtures)
    cfg = Config(provider="scripted", fixtures_dir=fixtures)
    history = preprocess_scripts(
        ScriptHistory(scripts=scripts, table_ref=schema.table), cfg.gen)
    drafts = [map_generate(s, schema, lineage, cfg.gen, gateway).bundle
              for s in history.scripts]
    if not drafts:
        click.echo("no scripts survived preprocessing", err=True)
        sys.exit(1)
    bundle = reduce_synthesize(drafts, schema, lineage, gateway)
    Path(out_path).write_text(
        json.dumps(bundle.to_json(), indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    click.echo(f"wrote {out_path}")


@kg.command()
@click.option("--graph", "graph_path", type=click.Path(exists=True),
              required=True, help="nodes JSONL file")
@click.option("--task", default="nl2dsl")
@click.option("--q", "query", required=True)
@click.option("--fixtures", type=click.Path(exists=True), required=True)
@click.option("--table", default="data")
@click.option("--now", default="2024-06-01")
def query(graph_path: str, task: str, query: str, fixtures: str, table: str,
          now: str) -> None:
    """Retrieve knowledge and translate the query; emits {topk, dsl, sql, chart}."""
    from ..knowledge.dsl import dsl_to_sql, dsl_to_vis, translate_to_dsl
    from ..knowledge.index import build_indexes
    from ..knowledge.retrieve import (
        RetrievalConfig,
        coarse_retrieve,
        fine_order,
        rewrite_query,
    )
    from ..errors import UnchartableSpec
    gateway = _gateway(fixtures)
    graph = KnowledgeGraph.import_jsonl(graph_path)
    indexes = build_indexes(graph, task if task in ("nl2dsl", "nl2sql") else "default",
                            gateway)
    cfg = RetrievalConfig(weights=(0.5, 0.5, 0.0))
    rewritten = rewrite_query(query, [], now, gateway)
    top = fine_order(rewritten,
                     coarse_retrieve(rewritten, graph, cfg, indexes, gateway),
                     cfg, gateway, indexes=indexes)
    out = {"topk": [{"id": s.node.id, "name": s.node.name, "score": s.score}
                    for s in top],
           "dsl": None, "sql": None, "chart": None}
    try:
        spec = translate_to_dsl(rewritten, top, gateway)
        out["dsl"] = spec.to_json()
        out["sql"] = dsl_to_sql(spec, table)
        try:
            out["chart"] = dsl_to_vis(spec)
        except UnchartableSpec:
            pass
    except AskbookError as exc:
        out["error"] = f"{type(exc).__name__}: {exc}"
    _echo_json(out)


@main.group()
def dag() -> None:
    """Dependency-graph operations."""


@dag.command("build")
@click.argument("notebook_path", type=click.Path(exists=True))
def dag_build(notebook_path: str) -> None:
    """Build the cell DAG for a notebook file; emits {nodes, edges, diagnostics}."""
    nb = parse_notebook(Path(notebook_path).read_bytes())
    graph = build_dag(nb)
    out = graph.to_json()
    _echo_json({"nodes": out["nodes"], "edges": out["edges"],
                "diagnostics": out["diagnostics"]})


@main.group()
def context() -> None:
    """Context retrieval."""


@context.command("get")
@click.option("--notebook", type=click.Path(exists=True), required=True)
@click.option("--level", type=click.Choice(["cell", "notebook"]), required=True)
@click.option("--anchor", default=None)
@click.option("--var", "variable", default=None)
@click.option("--task", default="Other")
@click.option("--query", required=True)
@click.option("--fixtures", type=click.Path(exists=True), default=None)
def context_get(notebook: str, level: str, anchor: str | None,
                variable: str | None, task: str, query: str,
                fixtures: str | None) -> None:
    """Retrieve the minimum relevant cell set for a query."""
    nb = parse_notebook(Path(notebook).read_bytes())
    graph = build_dag(nb)
    scope = QueryScope(level=level, anchor_cell=anchor, data_variable=variable,
                       task_type=TaskType(task))
    gateway = _gateway(fixtures) if fixtures else None
    bundle = retrieve_context(graph, nb, scope, query, gateway=gateway)
    _echo_json(bundle.to_json())


@main.command()
@click.argument("scenario_path", type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None,
              help="write trace/notebook/buffer artifacts here")
@click.option("--decision", type=click.Choice(["accept", "reject"]),
              default="accept")
def replay(scenario_path: str, out_dir: str | None, decision: str) -> None:
    """Run a committed scenario deterministically."""
    result = run_scenario(scenario_path, decision=decision)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for filename, data in result.artifacts().items():
            (out / filename).write_bytes(data)
        click.echo(f"wrote artifacts to {out}")
    else:
        click.echo(result.suggestion.answer)
        _echo_json({"states": result.states,
                    "cells": [c.to_json() for c in result.suggestion.cells]})


if __name__ == "__main__":
    main()
