import json

import pytest

from askbook.errors import (
    DSLValidationError,
    UnchartableSpec,
    UnresolvedColumn,
    UnsupportedOperator,
)
from askbook.gateway import Gateway, SequenceProvider
from askbook.knowledge.dsl import (
    ColumnCatalog,
    Condition,
    Dimension,
    DSLSpec,
    Measure,
    OrderItem,
    catalog_from_knowledge,
    dsl_to_sql,
    dsl_to_vis,
    translate_to_dsl,
    validate_chart_spec,
    validate_dsl,
)
from askbook.knowledge.profile import profile_table

from helpers.oracle import parse_sql_clauses
from test_kgraph import fixture_bundle
from askbook.knowledge.graph import KnowledgeGraph, upsert_knowledge

CATALOG = ColumnCatalog(kinds={
    "prod_class4_name": "categorical", "shouldincome_after": "numeric",
    "ftime": "temporal", "region": "categorical", "quantity": "numeric",
    "discount": "numeric", "channel": "categorical",
})

TENCENTBI_SPEC = DSLSpec(
    measures=(Measure("shouldincome_after", "sum"),),
    dimensions=(),
    conditions=(Condition("prod_class4_name", "=", "TencentBI"),
                Condition("ftime", "between", ["2024-01-01", "2024-12-31"])),
)

GOLDEN_TENCENTBI_SQL = (
    "SELECT SUM(shouldincome_after) FROM sales_daily "
    "WHERE prod_class4_name = 'TencentBI' "
    "AND ftime BETWEEN '2024-01-01' AND '2024-12-31'"
)


class TestValidate:
    def test_unknown_field_rejected(self):
        with pytest.raises(DSLValidationError) as info:
            validate_dsl({"MeasureList": [], "DimensionList": [],
                          "ConditionList": [], "FooList": []})
        assert any("FooList" in issue for issue in info.value.issues)

    def test_unresolved_column(self):
        raw = {"MeasureList": [{"column": "ghost", "aggregation": "sum"}],
               "DimensionList": [], "ConditionList": []}
        with pytest.raises(UnresolvedColumn):
            validate_dsl(raw, CATALOG)

    def test_dimension_type_filled_from_catalog(self):
        raw = {"MeasureList": [{"column": "quantity", "aggregation": "sum"}],
               "DimensionList": ["ftime"], "ConditionList": []}
        spec = validate_dsl(raw, CATALOG)
        assert spec.dimensions[0].type == "temporal"

    def test_malformed_fixtures_all_rejected_with_field_messages(self, data_dir):
        lines = (data_dir / "dsl" / "malformed.jsonl").read_text().splitlines()
        assert len(lines) == 25
        for line in lines:
            case = json.loads(line)
            with pytest.raises(DSLValidationError) as info:
                validate_dsl(case["spec"], CATALOG)
            field = case["bad_field"]
            root = field.split(".")[0]
            assert any(root in issue for issue in info.value.issues), \
                f"no message names {root}: {info.value.issues}"

    def test_valid_fixtures_all_accepted(self, data_dir):
        lines = (data_dir / "dsl" / "valid.jsonl").read_text().splitlines()
        assert len(lines) == 25
        for line in lines:
            spec = validate_dsl(json.loads(line), CATALOG)
            assert isinstance(spec, DSLSpec)


class TestSql:
    def test_single_measure_no_group_by(self):
        spec = DSLSpec(measures=(Measure("x", "sum"),),
                       conditions=(Condition("y", ">", 5),))
        sql = dsl_to_sql(spec, "t")
        assert sql == "SELECT SUM(x) FROM t WHERE y > 5"
        assert "GROUP BY" not in sql

    def test_two_dimensions_group_by_order(self):
        spec = DSLSpec(measures=(Measure("m", "avg"),),
                       dimensions=(Dimension("a"), Dimension("b")))
        sql = dsl_to_sql(spec, "t")
        assert "GROUP BY a, b" in sql

    def test_golden_tencentbi_sql(self):
        assert dsl_to_sql(TENCENTBI_SPEC, "sales_daily") == GOLDEN_TENCENTBI_SQL

    def test_golden_matches_clause_oracle(self):
        clauses = parse_sql_clauses(GOLDEN_TENCENTBI_SQL)
        assert clauses["select"] == ["SUM(shouldincome_after)"]
        assert clauses["table"] == "sales_daily"
        assert sorted(clauses["where"]) == sorted([
            "prod_class4_name = 'TencentBI'",
            "ftime BETWEEN '2024-01-01' AND '2024-12-31'"])

    def test_valid_fixtures_round_trip_clause_sets(self, data_dir):
        lines = (data_dir / "dsl" / "valid.jsonl").read_text().splitlines()
        for line in lines:
            raw = json.loads(line)
            spec = validate_dsl(raw, CATALOG)
            sql = dsl_to_sql(spec, "sales_daily")
            clauses = parse_sql_clauses(sql)
            dims = [d.column for d in spec.dimensions]
            expected_select = dims + [
                f"COUNT(DISTINCT {m.column})" if m.aggregation == "count_distinct"
                else f"{m.aggregation.upper()}({m.column})"
                for m in spec.measures]
            assert clauses["select"] == expected_select
            assert clauses["group_by"] == (dims if dims and spec.measures else [])
            assert len(clauses["where"]) == len(spec.conditions)
            assert clauses["limit"] == spec.limit

    def test_unsupported_operator(self):
        spec = DSLSpec(conditions=(Condition("x", "regex", ".*"),))
        with pytest.raises(UnsupportedOperator):
            dsl_to_sql(spec, "t")

    def test_string_escaping(self):
        spec = DSLSpec(conditions=(Condition("name", "=", "O'Brien"),))
        assert "O''Brien" in dsl_to_sql(spec, "t")

    def test_rendering_is_pure(self):
        assert dsl_to_sql(TENCENTBI_SPEC, "sales_daily") == \
            dsl_to_sql(TENCENTBI_SPEC, "sales_daily")


class TestVis:
    def test_categorical_dim_plus_measure_is_bar(self):
        spec = DSLSpec(measures=(Measure("income", "sum"),),
                       dimensions=(Dimension("product", "categorical"),))
        chart = dsl_to_vis(spec)
        assert chart["mark"] == "bar"
        assert chart["encoding"]["x"]["field"] == "product"
        assert chart["encoding"]["y"] == {"field": "income", "aggregate": "sum",
                                          "type": "quantitative"}
        validate_chart_spec(chart)

    def test_temporal_dim_is_line(self):
        spec = DSLSpec(measures=(Measure("income", "sum"),),
                       dimensions=(Dimension("ftime", "temporal"),))
        chart = dsl_to_vis(spec)
        assert chart["mark"] == "line"
        assert chart["encoding"]["x"]["type"] == "temporal"

    def test_two_measures_no_dims_is_scatter(self):
        spec = DSLSpec(measures=(Measure("a", "sum"), Measure("b", "avg")))
        chart = dsl_to_vis(spec)
        assert chart["mark"] == "point"
        assert chart["encoding"]["x"]["field"] == "a"
        assert chart["encoding"]["y"]["field"] == "b"

    def test_zero_measures_unchartable(self):
        with pytest.raises(UnchartableSpec):
            dsl_to_vis(DSLSpec(dimensions=(Dimension("a"),)))

    def test_second_dimension_becomes_color(self):
        spec = DSLSpec(measures=(Measure("m", "sum"),),
                       dimensions=(Dimension("a"), Dimension("b")))
        chart = dsl_to_vis(spec)
        assert chart["encoding"]["color"]["field"] == "b"

    def test_single_measure_no_dims(self):
        chart = dsl_to_vis(DSLSpec(measures=(Measure("m", "count"),)))
        assert chart["mark"] == "bar"
        assert "x" not in chart["encoding"]


class TestTranslate:
    def knowledge(self):
        graph = upsert_knowledge(KnowledgeGraph(), fixture_bundle())
        return graph.primary_nodes()

    def test_tencentbi_example(self):
        reply = json.dumps(TENCENTBI_SPEC.to_json())
        gw = Gateway(SequenceProvider({"dsl.translate": [reply]}))
        spec = translate_to_dsl(
            "total shouldincome_after for TencentBI in 2024-01-01..2024-12-31",
            self.knowledge(), gw)
        assert spec.measures == (Measure("shouldincome_after", "sum"),)
        assert spec.dimensions == ()
        assert {c.column for c in spec.conditions} == {"prod_class4_name", "ftime"}
        assert dsl_to_sql(spec, "sales_daily") == GOLDEN_TENCENTBI_SQL

    def test_unknown_field_from_model(self):
        reply = json.dumps({"MeasureList": [], "DimensionList": [],
                            "ConditionList": [], "FooList": []})
        gw = Gateway(SequenceProvider({"dsl.translate": [reply]}))
        with pytest.raises(DSLValidationError):
            translate_to_dsl("q", self.knowledge(), gw)

    def test_column_absent_from_knowledge(self):
        reply = json.dumps({
            "MeasureList": [{"column": "mystery", "aggregation": "sum"}],
            "DimensionList": [], "ConditionList": []})
        gw = Gateway(SequenceProvider({"dsl.translate": [reply]}))
        with pytest.raises(UnresolvedColumn):
            translate_to_dsl("q", self.knowledge(), gw)

    def test_profile_fallback_when_knowledge_empty(self):
        profile = profile_table({"day": ["2024-01-01", "2024-01-02"],
                                 "amount": [5, 9]}, seed=1)
        reply = json.dumps({
            "MeasureList": [{"column": "amount", "aggregation": "sum"}],
            "DimensionList": [{"column": "day"}], "ConditionList": []})
        provider = SequenceProvider({"dsl.translate": [reply]})
        gw = Gateway(provider)
        spec = translate_to_dsl("daily totals", [], gw, profile=profile)
        assert spec.dimensions[0].type == "temporal"  # profile typed day as date
        (_, prompt), = provider.calls
        assert "amount" in prompt  # profile columns injected into the prompt

    def test_catalog_from_knowledge_types(self):
        catalog = catalog_from_knowledge(self.knowledge())
        assert catalog.dimension_type("ftime") == "temporal"
        assert catalog.dimension_type("prod_class4_name") == "categorical"
        assert "net_margin" in catalog   # derived column resolvable
