#!/usr/bin/env python3
"""Regenerate the frontend integration-test fixtures.

Records the prompts the service issues for the canonical NL2VIS ask against
the seeded notebook, then dumps fingerprint-keyed completions plus the
notebook/rows documents the test loads. The recorded prompts are stable
because the scenario is fully deterministic (fixed now, fixed notebook,
logical clocks).
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from askbook.context.retrieve import QueryScope, TaskType  # noqa: E402
from askbook.gateway import Gateway, ReplayFixture, SequenceProvider  # noqa: E402
from askbook.notebook import parse_notebook  # noqa: E402
from askbook.service.config import Config  # noqa: E402
from askbook.service.session import SessionManager  # noqa: E402
from askbook.service.store import NotebookStore  # noqa: E402

OUT = ROOT / "frontend" / "test" / "fixtures"

NOTEBOOK = {
    "id": "nb_ui",
    "revision": 0,
    "cells": [
        {"id": "c1", "kind": "sql", "binding": "df1",
         "source": "SELECT prod_class4_name, shouldincome_after, ftime FROM sales_daily"},
        {"id": "c2", "kind": "markdown",
         "source": "## Income overview\nRevenue by product line."},
    ],
}

ROWS = [
    {"prod_class4_name": "TencentBI", "shouldincome_after": 120.5,
     "ftime": "2024-03-01"},
    {"prod_class4_name": "TencentBI", "shouldincome_after": 80.0,
     "ftime": "2024-04-01"},
    {"prod_class4_name": "TencentDoc", "shouldincome_after": 40.25,
     "ftime": "2024-03-01"},
]

QUERY = "plot income by product"

CHART = {"grammar": "askbook/chart/v1", "data": {"name": "data"},
         "mark": "bar",
         "encoding": {"x": {"field": "prod_class4_name", "type": "nominal"},
                      "y": {"field": "income", "aggregate": "sum",
                            "type": "quantitative"}}}

PLAN = {"version": 1, "subtasks": [
    {"id": "t1", "description": "write sql for income by product",
     "capability": "NL2SQL", "agent": "sql_agent", "depends_on": []},
    {"id": "t2", "description": "chart the result", "capability": "NL2VIS",
     "agent": "vis_agent", "depends_on": ["t1"]}],
    "transitions": [{"from": "sql_agent", "to": "vis_agent"}]}

REPLIES = {
    "rewrite": "income by product line as a bar chart",
    "plan": json.dumps(PLAN),
    "agent.sql_agent.generate_sql_query":
        "SELECT prod_class4_name, SUM(shouldincome_after) AS income "
        "FROM sales_daily GROUP BY prod_class4_name ORDER BY prod_class4_name",
    "agent.vis_agent.generate_chart_spec": json.dumps(CHART),
    "finalize": "Proposed a SQL query and a bar chart of income by product.",
}


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    store = NotebookStore(tempfile.mkdtemp(prefix="askbook_ffx_"))
    store.put_document(parse_notebook(json.dumps(NOTEBOOK).encode()))
    recorder = SequenceProvider({tag: [reply] for tag, reply in REPLIES.items()})
    manager = SessionManager(
        Config(store_dir=store.directory.as_posix(), provider="scripted",
               fixtures_dir=".", now="2024-06-01"),
        store, Gateway(recorder))
    session = manager.create_session("nb_ui", table_name="sales_daily",
                                     rows=ROWS)
    scope = QueryScope(level="notebook", data_variable="df1",
                       task_type=TaskType.NL2VIS)
    suggestion = manager.ask(session, QUERY, scope)
    assert [c.kind.value for c in suggestion.cells] == ["sql", "chart"]

    fixture = ReplayFixture()
    for tag, prompt in recorder.calls:
        fixture.add(prompt, REPLIES[tag], prompt_tokens=len(prompt) // 4,
                    completion_tokens=len(REPLIES[tag]) // 4)
    fixture.dump(OUT)
    (OUT / "notebook.json").write_text(
        json.dumps(NOTEBOOK, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (OUT / "rows.json").write_text(
        json.dumps(ROWS, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (OUT / "meta.json").write_text(json.dumps({
        "query": QUERY,
        "scope": {"level": "notebook", "data_variable": "df1",
                  "task_type": "NL2VIS"},
        "table_name": "sales_daily",
        "now": "2024-06-01",
    }, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {len(fixture.entries)} fixture prompts to {OUT}")


if __name__ == "__main__":
    main()
