"""Data tools agents call during workflow execution.

Three built-in kinds: a Python sandbox (isolated subprocess, jailed working
directory, wall-clock timeout, no inherited environment), a SQL executor
(sqlite over the in-memory fixture table), and a chart renderer (validates a
chart grammar doc and binds result rows into it). Tool calls are
side-effect-contained: nothing escapes the jail directory and the subprocess
gets no network-facing configuration.
"""

from __future__ import annotations

import json
import sqlite3
import subprocess
import sys
import tempfile
from dataclasses import dataclass
from typing import Any

from ..errors import StepTimeout, ToolFailure
from ..knowledge.dsl import validate_chart_spec
from .units import Payload, PayloadKind

DEFAULT_TIMEOUT = 30.0


@dataclass(frozen=True)
class Tool:
    name: str
    kind: str                      # code_sandbox | sql_executor | chart_renderer
    input_kinds: tuple[PayloadKind, ...]
    output_kind: PayloadKind
    timeout: float = DEFAULT_TIMEOUT


def default_tools() -> "ToolRunner":
    return ToolRunner([
        Tool(name="run_python", kind="code_sandbox",
             input_kinds=(PayloadKind.CODE,), output_kind=PayloadKind.TEXT),
        Tool(name="execute_sql", kind="sql_executor",
             input_kinds=(PayloadKind.SQL,), output_kind=PayloadKind.TABLE_PREVIEW),
        Tool(name="render_chart", kind="chart_renderer",
             input_kinds=(PayloadKind.CHART_SPEC, PayloadKind.TABLE_PREVIEW),
             output_kind=PayloadKind.CHART_SPEC),
    ])


class ToolRunner:
    def __init__(self, tools: list[Tool]):
        self.tools = {tool.name: tool for tool in tools}

    def get(self, name: str) -> Tool:
        tool = self.tools.get(name)
        if tool is None:
            raise ToolFailure(f"tool {name!r} is not registered")
        return tool

    def run(self, name: str, payloads: list[Payload],
            envelope: dict[str, Any]) -> Payload:
        tool = self.get(name)
        if tool.kind == "code_sandbox":
            return self._run_code(tool, payloads)
        if tool.kind == "sql_executor":
            return self._run_sql(tool, payloads, envelope)
        if tool.kind == "chart_renderer":
            return self._render_chart(tool, payloads)
        raise ToolFailure(f"unknown tool kind {tool.kind!r}")

    # --- code sandbox ---------------------------------------------------------

    def _run_code(self, tool: Tool, payloads: list[Payload]) -> Payload:
        code = _first(payloads, PayloadKind.CODE)
        with tempfile.TemporaryDirectory(prefix="askbook_sandbox_") as jail:
            try:
                proc = subprocess.run(
                    [sys.executable, "-I", "-c", str(code.value)],
                    cwd=jail, env={"PYTHONHASHSEED": "0"},
                    capture_output=True, text=True, timeout=tool.timeout)
            except subprocess.TimeoutExpired as exc:
                raise StepTimeout(
                    f"{tool.name}: exceeded {tool.timeout}s") from exc
        if proc.returncode != 0:
            raise ToolFailure(f"{tool.name}: exit {proc.returncode}: "
                              f"{proc.stderr.strip()[:400]}")
        return Payload(PayloadKind.TEXT, proc.stdout)

    # --- sql executor -----------------------------------------------------------

    def _run_sql(self, tool: Tool, payloads: list[Payload],
                 envelope: dict[str, Any]) -> Payload:
        sql = _first(payloads, PayloadKind.SQL)
        rows = envelope.get("rows") or []
        table = envelope.get("table_name", "data")
        columns: list[str] = []
        for row in rows:
            for key in row:
                if key not in columns:
                    columns.append(key)
        conn = sqlite3.connect(":memory:")
        try:
            if columns:
                decl = ", ".join(f'"{c}"' for c in columns)
                conn.execute(f'CREATE TABLE "{table}" ({decl})')
                conn.executemany(
                    f'INSERT INTO "{table}" VALUES ({", ".join("?" * len(columns))})',
                    [tuple(row.get(c) for c in columns) for row in rows])
            try:
                cursor = conn.execute(str(sql.value))
            except sqlite3.Error as exc:
                raise ToolFailure(f"{tool.name}: {exc}") from exc
            out_cols = [d[0] for d in cursor.description] if cursor.description else []
            out_rows = [list(r) for r in cursor.fetchall()]
        finally:
            conn.close()
        return Payload(PayloadKind.TABLE_PREVIEW,
                       {"columns": out_cols, "rows": out_rows})

    # --- chart renderer -----------------------------------------------------------

    def _render_chart(self, tool: Tool, payloads: list[Payload]) -> Payload:
        spec = _first(payloads, PayloadKind.CHART_SPEC)
        doc = spec.value
        if isinstance(doc, str):
            try:
                doc = json.loads(doc)
            except json.JSONDecodeError as exc:
                raise ToolFailure(f"{tool.name}: spec is not JSON: {exc}") from exc
        validate_chart_spec(doc)
        rendered = dict(doc)
        preview = _maybe(payloads, PayloadKind.TABLE_PREVIEW)
        if preview is not None:
            table = preview.value
            values = [dict(zip(table["columns"], row)) for row in table["rows"]]
            rendered["data"] = {"values": values}
        return Payload(PayloadKind.CHART_SPEC, rendered)


def _first(payloads: list[Payload], kind: PayloadKind) -> Payload:
    for payload in payloads:
        if payload.kind is kind:
            return payload
    raise ToolFailure(f"no {kind.value} payload among inputs")


def _maybe(payloads: list[Payload], kind: PayloadKind) -> Payload | None:
    for payload in payloads:
        if payload.kind is kind:
            return payload
    return None
