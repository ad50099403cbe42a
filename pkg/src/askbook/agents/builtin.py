"""Built-in agent roster covering the supported task capabilities."""

from __future__ import annotations

from .units import PayloadKind
from .workflow import AgentSpec, Step

_SQL_PROMPT = (
    "Write one SQL query answering the subtask.\n"
    "Subtask: {subtask}\n"
    "Query: {query}\n"
    "Table: {table_name}\n"
    "Knowledge:\n{knowledge}\n"
    "Suggested spec SQL (from the DSL stage, adapt if needed): {dsl_sql}\n"
    "Context cells:\n{context}\n"
    "Previous error (fix it if present): {last_error}\n"
    "Reply with SQL only.")

_CHART_PROMPT = (
    "Produce a chart grammar JSON document ({{\"grammar\": \"askbook/chart/v1\", "
    "\"data\": ..., \"mark\": ..., \"encoding\": ...}}) for the subtask.\n"
    "Subtask: {subtask}\n"
    "Query: {query}\n"
    "Result preview: {fetch_data}\n"
    "Delivered units:\n{units}\n"
    "Previous error (fix it if present): {last_error}\n"
    "Reply with JSON only.")

_CODE_PROMPT = (
    "Write Python (pandas-style) code for the subtask. The code must print "
    "its result.\n"
    "Subtask: {subtask}\n"
    "Query: {query}\n"
    "Knowledge:\n{knowledge}\n"
    "Context cells:\n{context}\n"
    "Delivered units:\n{units}\n"
    "Previous error (fix it if present): {last_error}\n"
    "Reply with code only.")

_INSIGHT_CODE_PROMPT = (
    "Write a short Python script that computes the figures needed for this "
    "analysis and prints them.\n"
    "Subtask: {subtask}\nQuery: {query}\nKnowledge:\n{knowledge}\n"
    "Delivered units:\n{units}\n"
    "Previous error (fix it if present): {last_error}\n"
    "Reply with code only.")

_INSIGHT_SUMMARY_PROMPT = (
    "Summarize the computed figures below into 2-3 data insights.\n"
    "Figures:\n{run_analysis}\n"
    "Query: {query}\n"
    "Reply with plain text.")

_ONE_SHOT_TEXT_PROMPT = (
    "Complete the subtask and reply with a concise text result.\n"
    "Subtask: {subtask}\nQuery: {query}\n"
    "Delivered units:\n{units}\n")


def builtin_registry() -> dict[str, AgentSpec]:
    specs = [
        AgentSpec(
            id="sql_agent", role="SQL Agent", capabilities=("NL2SQL",),
            description="writes SQL against the scoped table",
            workflow=(
                Step(id="generate_sql_query", kind="llm", prompt=_SQL_PROMPT,
                     output=PayloadKind.SQL),
            )),
        AgentSpec(
            id="vis_agent", role="VIS Agent", capabilities=("NL2VIS",),
            description="runs the delivered SQL and renders a chart spec",
            workflow=(
                Step(id="fetch_data", kind="tool", tool="execute_sql",
                     inputs=("units:sql",)),
                Step(id="generate_chart_spec", kind="llm", prompt=_CHART_PROMPT,
                     inputs=("step:fetch_data",), output=PayloadKind.CHART_SPEC),
                Step(id="render_chart", kind="tool", tool="render_chart",
                     inputs=("step:generate_chart_spec", "step:fetch_data")),
            )),
        AgentSpec(
            id="ds_agent", role="DS Agent", capabilities=("NL2DSCode",),
            description="writes data-science Python for the notebook",
            workflow=(
                Step(id="generate_python_code", kind="llm", prompt=_CODE_PROMPT,
                     output=PayloadKind.CODE),
            )),
        AgentSpec(
            id="insight_agent", role="Insight Agent",
            capabilities=("NL2Insight",),
            description="computes figures in the sandbox and summarizes insights",
            workflow=(
                Step(id="write_analysis_code", kind="llm",
                     prompt=_INSIGHT_CODE_PROMPT, output=PayloadKind.CODE),
                Step(id="run_analysis", kind="tool", tool="run_python",
                     inputs=("step:write_analysis_code",)),
                Step(id="summarize_insight", kind="llm",
                     prompt=_INSIGHT_SUMMARY_PROMPT,
                     inputs=("step:run_analysis",), output=PayloadKind.TEXT),
            )),
        AgentSpec(
            id="anomaly_agent", role="Anomaly Agent",
            capabilities=("AnomalyDetection",),
            description="flags anomalous segments in delivered results",
            workflow=(
                Step(id="detect_anomalies", kind="llm",
                     prompt=_ONE_SHOT_TEXT_PROMPT, output=PayloadKind.TEXT),
            )),
        AgentSpec(
            id="causal_agent", role="Causal Agent",
            capabilities=("CausalAnalysis",),
            description="proposes causal explanations for observed changes",
            workflow=(
                Step(id="causal_analysis", kind="llm",
                     prompt=_ONE_SHOT_TEXT_PROMPT, output=PayloadKind.TEXT),
            )),
        AgentSpec(
            id="forecast_agent", role="Forecast Agent",
            capabilities=("Forecasting",),
            description="projects the delivered series forward",
            workflow=(
                Step(id="forecast_series", kind="llm",
                     prompt=_ONE_SHOT_TEXT_PROMPT, output=PayloadKind.TEXT),
            )),
    ]
    return {spec.id: spec for spec in specs}
