#!/usr/bin/env python3
"""Regenerate the committed replay scenarios (tests/data/scenarios/).

Twenty scenarios spanning 1-4 agents, retries, fan-out/fan-in transitions,
and every built-in agent kind, plus the canonical end-to-end NL2VIS scenario
with knowledge retrieval. Each file carries an ``expect`` block the
acceptance suite checks against the produced trace.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
OUT = ROOT / "tests" / "data" / "scenarios"

ROWS = [
    {"prod_class4_name": "TencentBI", "shouldincome_after": 120.5,
     "ftime": "2024-03-01"},
    {"prod_class4_name": "TencentBI", "shouldincome_after": 80.0,
     "ftime": "2024-04-01"},
    {"prod_class4_name": "TencentDoc", "shouldincome_after": 40.25,
     "ftime": "2024-03-01"},
]

GOOD_SQL = ("SELECT prod_class4_name, SUM(shouldincome_after) AS income "
            "FROM sales_daily GROUP BY prod_class4_name ORDER BY prod_class4_name")

CHART = {"grammar": "askbook/chart/v1", "data": {"name": "data"},
         "mark": "bar",
         "encoding": {"x": {"field": "prod_class4_name", "type": "nominal"},
                      "y": {"field": "income", "aggregate": "sum",
                            "type": "quantitative"}}}

AGENT_REPLIES = {
    "sql_agent": {"agent.sql_agent.generate_sql_query": [GOOD_SQL]},
    "vis_agent": {"agent.vis_agent.generate_chart_spec": [json.dumps(CHART)]},
    "ds_agent": {"agent.ds_agent.generate_python_code":
                 ["result = df1.groupby('prod_class4_name').sum()\nprint(result)"]},
    "insight_agent": {
        "agent.insight_agent.write_analysis_code": ["print(120.5 + 80.0)"],
        "agent.insight_agent.summarize_insight":
            ["TencentBI income totals 200.5 across the period."]},
    "anomaly_agent": {"agent.anomaly_agent.detect_anomalies":
                      ["No anomalous segments in the delivered series."]},
    "causal_agent": {"agent.causal_agent.causal_analysis":
                     ["April dip follows the March promotion ending."]},
    "forecast_agent": {"agent.forecast_agent.forecast_series":
                       ["Projected next-month income: 95.0."]},
}

# (name, agents in subtask order, transitions, task_type, retries map)
TOPOLOGIES = [
    ("sql_only", ["sql_agent"], [], "NL2SQL", {}),
    ("ds_only", ["ds_agent"], [], "NL2DSCode", {}),
    ("insight_only", ["insight_agent"], [], "NL2Insight", {}),
    ("anomaly_only", ["anomaly_agent"], [], "Other", {}),
    ("forecast_only", ["forecast_agent"], [], "Other", {}),
    ("nl2vis_chain", ["sql_agent", "vis_agent"],
     [("sql_agent", "vis_agent")], "NL2VIS", {}),
    ("sql_to_insight", ["sql_agent", "insight_agent"],
     [("sql_agent", "insight_agent")], "NL2Insight", {}),
    ("sql_to_ds", ["sql_agent", "ds_agent"],
     [("sql_agent", "ds_agent")], "NL2DSCode", {}),
    ("sql_to_anomaly", ["sql_agent", "anomaly_agent"],
     [("sql_agent", "anomaly_agent")], "Other", {}),
    ("sql_to_forecast", ["sql_agent", "forecast_agent"],
     [("sql_agent", "forecast_agent")], "Other", {}),
    ("vis_with_retry", ["sql_agent", "vis_agent"],
     [("sql_agent", "vis_agent")], "NL2VIS", {"sql_agent": 1}),
    ("vis_two_retries", ["sql_agent", "vis_agent"],
     [("sql_agent", "vis_agent")], "NL2VIS", {"sql_agent": 2}),
    ("budget_edge_four_failures", ["sql_agent"], [], "NL2SQL",
     {"sql_agent": 4}),
    ("fan_out", ["sql_agent", "vis_agent", "insight_agent"],
     [("sql_agent", "vis_agent"), ("sql_agent", "insight_agent")],
     "NL2Insight", {}),
    ("fan_in", ["sql_agent", "insight_agent", "causal_agent"],
     [("sql_agent", "causal_agent"), ("insight_agent", "causal_agent")],
     "NL2Insight", {}),
    ("chain_three", ["sql_agent", "ds_agent", "insight_agent"],
     [("sql_agent", "ds_agent"), ("ds_agent", "insight_agent")],
     "NL2Insight", {}),
    ("four_agent_pipeline",
     ["sql_agent", "vis_agent", "anomaly_agent", "causal_agent"],
     [("sql_agent", "vis_agent"), ("sql_agent", "anomaly_agent"),
      ("anomaly_agent", "causal_agent")], "Other", {}),
    ("four_agent_diamond",
     ["sql_agent", "ds_agent", "forecast_agent", "causal_agent"],
     [("sql_agent", "ds_agent"), ("sql_agent", "forecast_agent"),
      ("ds_agent", "causal_agent"), ("forecast_agent", "causal_agent")],
     "Other", {}),
    ("insight_with_retry", ["sql_agent", "insight_agent"],
     [("sql_agent", "insight_agent")], "NL2Insight", {"insight_agent": 1}),
    ("four_agent_chain",
     ["sql_agent", "anomaly_agent", "causal_agent", "forecast_agent"],
     [("sql_agent", "anomaly_agent"), ("anomaly_agent", "causal_agent"),
      ("causal_agent", "forecast_agent")], "Other", {}),
]

CAPABILITY = {"sql_agent": "NL2SQL", "vis_agent": "NL2VIS",
              "ds_agent": "NL2DSCode", "insight_agent": "NL2Insight",
              "anomaly_agent": "AnomalyDetection",
              "causal_agent": "CausalAnalysis",
              "forecast_agent": "Forecasting"}

FAILURE_REPLY = {"sql_agent": "agent.sql_agent.generate_sql_query",
                 "insight_agent": "agent.insight_agent.write_analysis_code"}


def notebook(name: str) -> dict:
    return {"id": f"nb_{name}", "revision": 0, "cells": [
        {"id": "c1", "kind": "sql", "binding": "df1",
         "source": "SELECT prod_class4_name, shouldincome_after, ftime FROM sales_daily"},
        {"id": "c2", "kind": "markdown",
         "source": "income overview for product lines"},
    ]}


def plan_json(agents: list[str], transitions: list[tuple[str, str]]) -> str:
    subtasks = []
    for i, agent in enumerate(agents):
        deps = [f"t{j + 1}" for j, src in enumerate(agents[:i])
                if (src, agent) in transitions]
        subtasks.append({"id": f"t{i + 1}",
                         "description": f"{CAPABILITY[agent]} step for the query",
                         "capability": CAPABILITY[agent], "agent": agent,
                         "depends_on": deps})
    return json.dumps({"version": 1, "subtasks": subtasks,
                       "transitions": [{"from": a, "to": b}
                                       for a, b in transitions]})


def build_scenario(name, agents, transitions, task, retries) -> dict:
    tags: dict[str, list] = {
        "rewrite": [f"income of TencentBI by product ({name})"],
        "plan": [plan_json(agents, transitions)],
        "finalize": [f"Completed {len(agents)}-agent run for {name}."],
    }
    for agent in agents:
        for tag, replies in AGENT_REPLIES[agent].items():
            tags.setdefault(tag, []).extend(replies)
    for agent, n_failures in retries.items():
        tag = FAILURE_REPLY[agent]
        tags[tag] = [""] * n_failures + tags[tag]
    expected_cells = 0
    for agent in agents:
        terminal_kind = {"sql_agent": "sql", "vis_agent": "chart",
                         "ds_agent": "python"}.get(agent, "markdown")
        expected_cells += 1 if terminal_kind else 0
    return {
        "name": name,
        "notebook": notebook(name),
        "table_name": "sales_daily",
        "rows": ROWS,
        "now": "2024-06-01",
        "query": f"analyze income for scenario {name}",
        "scope": {"level": "notebook", "data_variable": "df1",
                  "task_type": task},
        "gateway": {"tags": tags},
        "expect": {
            "agents": sorted(set(agents)),
            "episodes": {agent: 1 + retries.get(agent, 0) for agent in agents},
            "transitions": sorted([list(e) for e in transitions]),
            "proposed_cells": expected_cells,
            "has_chart": "vis_agent" in agents,
        },
    }


def e2e_scenario() -> dict:
    """NL2VIS with knowledge retrieval and DSL translation in the loop."""
    base = build_scenario("nl2vis_e2e", ["sql_agent", "vis_agent"],
                          [("sql_agent", "vis_agent")], "NL2VIS", {})
    base["schema"] = {"database": "bi_dw", "table": "sales_daily",
                      "columns": [
                          {"name": "prod_class4_name", "declared_type": "string"},
                          {"name": "shouldincome_after", "declared_type": "float"},
                          {"name": "ftime", "declared_type": "date"}]}
    base["knowledge_bundle"] = {
        "database": {"description": "bi warehouse", "usage": "reporting",
                     "tags": ["dw"]},
        "table": {"description": "daily sales facts", "usage": "bi reports",
                  "organization": "partitioned by ftime",
                  "key_column_names": ["prod_class4_name"],
                  "key_derived_attribute_names": [], "tags": []},
        "columns": {
            "prod_class4_name": {"description": "product line name",
                                 "usage": "grouping", "type": "string",
                                 "tags": [], "values": ["TencentBI"]},
            "shouldincome_after": {"description": "net income amount",
                                   "usage": "revenue sums", "type": "float",
                                   "tags": [], "aliases": ["revenue", "income"]},
            "ftime": {"description": "business date", "usage": "time filter",
                      "type": "date", "tags": []},
        },
    }
    base["gateway"]["tags"]["dsl.translate"] = [json.dumps({
        "MeasureList": [{"column": "shouldincome_after", "aggregation": "sum"}],
        "DimensionList": [{"column": "prod_class4_name", "type": "categorical"}],
        "ConditionList": []})]
    base["gateway"]["fixtures_dir"] = "../fixtures"
    return base


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    scenarios = [build_scenario(*args) for args in TOPOLOGIES]
    scenarios.append(e2e_scenario())
    for scenario in scenarios:
        path = OUT / f"{scenario['name']}.json"
        path.write_text(json.dumps(scenario, indent=2, sort_keys=True) + "\n",
                        encoding="utf-8")
    print(f"wrote {len(scenarios)} scenarios to {OUT}")


if __name__ == "__main__":
    main()
