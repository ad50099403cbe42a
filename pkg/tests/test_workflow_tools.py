import json

import pytest

from askbook.agents.builtin import builtin_registry
from askbook.agents.tools import Tool, ToolRunner, default_tools
from askbook.agents.units import InformationUnit, Payload, PayloadKind
from askbook.agents.workflow import AgentSpec, LogicalClock, Step, run_agent_workflow
from askbook.errors import InvalidModelOutput, StepTimeout, ToolFailure
from askbook.gateway import Gateway, SequenceProvider

ROWS = [
    {"prod_class4_name": "TencentBI", "shouldincome_after": 120.5,
     "ftime": "2024-03-01"},
    {"prod_class4_name": "TencentBI", "shouldincome_after": 80.0,
     "ftime": "2024-04-01"},
    {"prod_class4_name": "TencentDoc", "shouldincome_after": 40.25,
     "ftime": "2024-03-01"},
]

ENVELOPE = {"query": "income of TencentBI by month", "data_source": "df1",
            "table_name": "sales_daily", "rows": ROWS,
            "knowledge": "- shouldincome_after: net income",
            "context": "(cells)", "dsl_sql": ""}


def sql_unit(sql, ts=1):
    return InformationUnit(data_source="df1", role="SQL Agent",
                           action="generate_sql_query",
                           description="wrote sql",
                           content=Payload(PayloadKind.SQL, sql), timestamp=ts)


class TestTools:
    def test_sql_executor_runs_against_fixture_rows(self):
        tools = default_tools()
        out = tools.run("execute_sql",
                        [Payload(PayloadKind.SQL,
                                 "SELECT prod_class4_name, SUM(shouldincome_after) AS income "
                                 "FROM sales_daily GROUP BY prod_class4_name "
                                 "ORDER BY prod_class4_name")],
                        ENVELOPE)
        assert out.kind is PayloadKind.TABLE_PREVIEW
        assert out.value["columns"] == ["prod_class4_name", "income"]
        assert out.value["rows"] == [["TencentBI", 200.5], ["TencentDoc", 40.25]]

    def test_sql_executor_bad_sql_is_tool_failure(self):
        with pytest.raises(ToolFailure):
            default_tools().run("execute_sql",
                                [Payload(PayloadKind.SQL, "SELEKT nothing")],
                                ENVELOPE)

    def test_code_sandbox_captures_stdout(self):
        out = default_tools().run("run_python",
                                  [Payload(PayloadKind.CODE, "print(6 * 7)")],
                                  {})
        assert out.kind is PayloadKind.TEXT
        assert out.value.strip() == "42"

    def test_code_sandbox_nonzero_exit_is_tool_failure(self):
        with pytest.raises(ToolFailure):
            default_tools().run("run_python",
                                [Payload(PayloadKind.CODE, "raise SystemExit(3)")],
                                {})

    def test_code_sandbox_timeout(self):
        runner = ToolRunner([Tool(name="run_python", kind="code_sandbox",
                                  input_kinds=(PayloadKind.CODE,),
                                  output_kind=PayloadKind.TEXT, timeout=0.4)])
        with pytest.raises(StepTimeout):
            runner.run("run_python",
                       [Payload(PayloadKind.CODE,
                                "while True:\n    pass")], {})

    def test_code_sandbox_is_jailed_cwd(self):
        out = default_tools().run(
            "run_python",
            [Payload(PayloadKind.CODE,
                     "import os; print('askbook_sandbox' in os.getcwd())")], {})
        assert out.value.strip() == "True"

    def test_chart_renderer_binds_data(self):
        spec = {"grammar": "askbook/chart/v1", "data": {"name": "data"},
                "mark": "bar",
                "encoding": {"x": {"field": "prod_class4_name", "type": "nominal"},
                             "y": {"field": "income", "aggregate": "sum",
                                   "type": "quantitative"}}}
        preview = Payload(PayloadKind.TABLE_PREVIEW,
                          {"columns": ["prod_class4_name", "income"],
                           "rows": [["TencentBI", 200.5]]})
        out = default_tools().run("render_chart",
                                  [Payload(PayloadKind.CHART_SPEC, spec), preview],
                                  {})
        assert out.value["data"]["values"] == [
            {"prod_class4_name": "TencentBI", "income": 200.5}]

    def test_chart_renderer_rejects_invalid_spec(self):
        with pytest.raises(Exception):
            default_tools().run("render_chart",
                                [Payload(PayloadKind.CHART_SPEC,
                                         {"mark": "hologram"})], {})

    def test_unknown_tool(self):
        with pytest.raises(ToolFailure):
            default_tools().run("teleport", [], {})


class TestRunWorkflow:
    def test_sql_agent_unit_shape(self):
        registry = builtin_registry()
        gw = Gateway(SequenceProvider({
            "agent.sql_agent.generate_sql_query":
                ["SELECT SUM(shouldincome_after) FROM sales_daily"]}))
        unit = run_agent_workflow(registry["sql_agent"], ENVELOPE, [], gw,
                                  default_tools(), LogicalClock())
        assert unit.role == "SQL Agent"
        assert unit.action == "generate_sql_query"
        assert unit.content.kind is PayloadKind.SQL
        assert unit.content.value.startswith("SELECT")
        assert unit.data_source == "df1"

    def test_vis_agent_end_to_end_over_fixture_rows(self):
        registry = builtin_registry()
        chart = {"grammar": "askbook/chart/v1", "data": {"name": "data"},
                 "mark": "bar",
                 "encoding": {"x": {"field": "prod_class4_name", "type": "nominal"},
                              "y": {"field": "income", "aggregate": "sum",
                                    "type": "quantitative"}}}
        gw = Gateway(SequenceProvider({
            "agent.vis_agent.generate_chart_spec": [json.dumps(chart)]}))
        delivered = [sql_unit(
            "SELECT prod_class4_name, SUM(shouldincome_after) AS income "
            "FROM sales_daily GROUP BY prod_class4_name")]
        unit = run_agent_workflow(registry["vis_agent"], ENVELOPE, delivered,
                                  gw, default_tools(), LogicalClock())
        assert unit.action == "render_chart"
        assert unit.content.kind is PayloadKind.CHART_SPEC
        assert unit.content.value["mark"] == "bar"
        assert unit.content.value["data"]["values"]   # data bound by renderer

    def test_tool_timeout_propagates_with_step_context(self):
        spec = AgentSpec(id="slow", role="Slow Agent", capabilities=("Other",),
                         workflow=(
                             Step(id="gen", kind="llm", prompt="x",
                                  output=PayloadKind.CODE),
                             Step(id="run", kind="tool", tool="run_python",
                                  inputs=("step:gen",)),
                         ))
        runner = ToolRunner([Tool(name="run_python", kind="code_sandbox",
                                  input_kinds=(PayloadKind.CODE,),
                                  output_kind=PayloadKind.TEXT, timeout=0.4)])
        gw = Gateway(SequenceProvider({"agent.slow.gen":
                                       ["while True:\n    pass"]}))
        with pytest.raises(StepTimeout):
            run_agent_workflow(spec, {}, [], gw, runner, LogicalClock())

    def test_unparseable_chart_json_is_invalid_model_output(self):
        registry = builtin_registry()
        gw = Gateway(SequenceProvider({
            "agent.vis_agent.generate_chart_spec": ["not json at all"]}))
        with pytest.raises(InvalidModelOutput):
            run_agent_workflow(registry["vis_agent"], ENVELOPE,
                               [sql_unit("SELECT 1")], gw, default_tools(),
                               LogicalClock())

    def test_insight_agent_runs_sandbox_step(self):
        registry = builtin_registry()
        gw = Gateway(SequenceProvider({
            "agent.insight_agent.write_analysis_code": ["print(2 + 2)"],
            "agent.insight_agent.summarize_insight":
                ["The computed total is 4."]}))
        unit = run_agent_workflow(registry["insight_agent"], ENVELOPE, [], gw,
                                  default_tools(), LogicalClock())
        assert unit.action == "summarize_insight"
        assert "4" in unit.content.value

    def test_step_inputs_must_reference_earlier_steps(self):
        with pytest.raises(ValueError):
            AgentSpec(id="bad", role="Bad", capabilities=("Other",),
                      workflow=(Step(id="a", kind="llm", prompt="p",
                                     inputs=("step:zzz",)),))

    def test_timestamps_monotone_per_clock(self):
        registry = builtin_registry()
        clock = LogicalClock()
        gw = Gateway(SequenceProvider({
            "agent.sql_agent.generate_sql_query": ["SELECT 1", "SELECT 2"]}))
        u1 = run_agent_workflow(registry["sql_agent"], ENVELOPE, [], gw,
                                default_tools(), clock)
        u2 = run_agent_workflow(registry["sql_agent"], ENVELOPE, [], gw,
                                default_tools(), clock)
        assert u2.timestamp > u1.timestamp
