"""DSL specification: the validated middle layer between queries and
SQL / chart output.

A spec names measures (numeric columns with aggregations), dimensions
(categorical or temporal columns), filters, and optional ordering/limit.
Model output is validated against a versioned JSON Schema with field-level
error messages, then every column reference is resolved against retrieved
knowledge or a table profile. Rendering to SQL and to the chart grammar is
rule-based and pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources as importlib_resources
from typing import Any, Iterable

import jsonschema

from ..errors import (
    DSLValidationError,
    InvalidModelOutput,
    UnchartableSpec,
    UnresolvedColumn,
    UnsupportedOperator,
)
from ..gateway import CompletionRequest, Gateway
from ..jsonutil import extract_json
from .graph import KnowledgeNode, NodeType
from .retrieve import ScoredNode
from .types import TableProfile

AGGREGATIONS = ("sum", "avg", "min", "max", "count", "count_distinct")

# Operator registry: DSL operator -> SQL renderer. Extensible via register_operator.
_OPERATORS: dict[str, Any] = {}


def _schema() -> dict:
    text = importlib_resources.files("askbook.knowledge").joinpath(
        "resources/dsl_spec.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


_SCHEMA = _schema()
_VALIDATOR = jsonschema.Draft7Validator(_SCHEMA)

SCHEMA_VERSION = _SCHEMA["$id"]


@dataclass(frozen=True)
class Measure:
    column: str
    aggregation: str = "sum"


@dataclass(frozen=True)
class Dimension:
    column: str
    type: str = "categorical"      # "categorical" | "temporal"


@dataclass(frozen=True)
class Condition:
    column: str
    operator: str
    literal: Any


@dataclass(frozen=True)
class OrderItem:
    column: str
    direction: str = "asc"


@dataclass(frozen=True)
class DSLSpec:
    measures: tuple[Measure, ...] = ()
    dimensions: tuple[Dimension, ...] = ()
    conditions: tuple[Condition, ...] = ()
    order: tuple[OrderItem, ...] = ()
    limit: int | None = None

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "MeasureList": [{"column": m.column, "aggregation": m.aggregation}
                            for m in self.measures],
            "DimensionList": [{"column": d.column, "type": d.type}
                              for d in self.dimensions],
            "ConditionList": [{"column": c.column, "operator": c.operator,
                               "literal": c.literal} for c in self.conditions],
        }
        if self.order:
            obj["OrderList"] = [{"column": o.column, "direction": o.direction}
                                for o in self.order]
        if self.limit is not None:
            obj["LimitN"] = self.limit
        return obj


@dataclass(frozen=True)
class ColumnCatalog:
    """Resolvable column names with their kinds ("temporal"/"categorical"/
    "numeric"), assembled from knowledge nodes and/or a profile."""

    kinds: dict[str, str] = field(default_factory=dict)

    def __contains__(self, column: str) -> bool:
        return column in self.kinds

    def dimension_type(self, column: str) -> str:
        return "temporal" if self.kinds.get(column) == "temporal" else "categorical"


_TEMPORAL_TYPES = {"date", "datetime", "time", "timestamp", "temporal"}
_NUMERIC_TYPES = {"int", "integer", "float", "double", "decimal", "number",
                  "numeric", "bigint"}


def catalog_from_knowledge(nodes: Iterable[KnowledgeNode | ScoredNode],
                           profile: TableProfile | None = None) -> ColumnCatalog:
    kinds: dict[str, str] = {}
    for item in nodes:
        node = item.node if isinstance(item, ScoredNode) else item
        if node.type is not NodeType.COLUMN:
            continue
        declared = str(node.components.get("type", "")).lower()
        if declared in _TEMPORAL_TYPES:
            kinds[node.name] = "temporal"
        elif declared in _NUMERIC_TYPES:
            kinds[node.name] = "numeric"
        else:
            kinds[node.name] = "categorical"
    if profile is not None:
        for col in profile.columns:
            if col.name in kinds:
                continue
            if col.inferred_type == "date":
                kinds[col.name] = "temporal"
            elif col.inferred_type in ("integer", "float"):
                kinds[col.name] = "numeric"
            else:
                kinds[col.name] = "categorical"
    return ColumnCatalog(kinds=kinds)


# --- validation -----------------------------------------------------------------

def validate_dsl(raw: Any, catalog: ColumnCatalog | None = None) -> DSLSpec:
    """Structural validation against the versioned schema, then column
    resolution against the catalog.

    Raises DSLValidationError with one message per offending field path, or
    UnresolvedColumn for a reference outside the catalog.
    """
    issues = []
    for error in sorted(_VALIDATOR.iter_errors(raw), key=lambda e: list(e.absolute_path)):
        path = ".".join(str(p) for p in error.absolute_path) or "$"
        issues.append(f"{path}: {error.message}")
    if issues:
        raise DSLValidationError(issues)

    measures = tuple(Measure(column=m["column"], aggregation=m["aggregation"])
                     for m in raw["MeasureList"])
    dimensions = []
    for d in raw["DimensionList"]:
        if isinstance(d, str):
            dimensions.append(Dimension(column=d))
        else:
            dimensions.append(Dimension(column=d["column"],
                                        type=d.get("type", "categorical")))
    conditions = tuple(Condition(column=c["column"], operator=c["operator"],
                                 literal=c["literal"])
                       for c in raw["ConditionList"])
    order = tuple(OrderItem(column=o["column"],
                            direction=o.get("direction", "asc"))
                  for o in raw.get("OrderList", []))
    spec = DSLSpec(measures=measures, dimensions=tuple(dimensions),
                   conditions=conditions, order=order, limit=raw.get("LimitN"))

    if catalog is not None:
        spec = _resolve_columns(spec, catalog)
    return spec


def _resolve_columns(spec: DSLSpec, catalog: ColumnCatalog) -> DSLSpec:
    referenced = ([m.column for m in spec.measures]
                  + [d.column for d in spec.dimensions]
                  + [c.column for c in spec.conditions]
                  + [o.column for o in spec.order])
    for column in referenced:
        if column not in catalog:
            raise UnresolvedColumn(
                f"column {column!r} is not in the retrieved knowledge or profile")
    dimensions = tuple(
        Dimension(column=d.column, type=catalog.dimension_type(d.column))
        if d.type == "categorical" else d
        for d in spec.dimensions)
    return DSLSpec(measures=spec.measures, dimensions=dimensions,
                   conditions=spec.conditions, order=spec.order, limit=spec.limit)


# --- translation ------------------------------------------------------------------

_EXAMPLE = {
    "MeasureList": [{"column": "amount", "aggregation": "sum"}],
    "DimensionList": [{"column": "region", "type": "categorical"}],
    "ConditionList": [{"column": "day", "operator": "between",
                       "literal": ["2024-01-01", "2024-12-31"]}],
}


def translate_to_dsl(query: str, knowledge: list[ScoredNode] | list[KnowledgeNode],
                     gateway: Gateway, profile: TableProfile | None = None,
                     ) -> DSLSpec:
    """Model translation of a rewritten query into a validated DSLSpec.

    When retrieval came back empty, profile column descriptions are injected
    instead (the in-the-wild fallback). Raises InvalidModelOutput for
    unparseable replies, DSLValidationError / UnresolvedColumn downstream.
    """
    lines = []
    for item in knowledge:
        node = item.node if isinstance(item, ScoredNode) else item
        lines.append(f"- [{node.type.value}] {node.name}: "
                     f"{node.components.get('description', '')}"
                     f" {node.components.get('calculation_logic', '')}".rstrip())
    if not lines and profile is not None:
        for col in profile.columns:
            lines.append(f"- [column] {col.name}: {col.inferred_type}, "
                         f"range {col.min}..{col.max}")
    prompt = (
        "Translate the analytics query into a DSL JSON object with keys "
        "MeasureList (numeric columns + aggregation), DimensionList "
        "(grouping columns), ConditionList (filters), and optional OrderList "
        "and LimitN. Use only the columns listed in the knowledge section.\n"
        f"Example: {json.dumps(_EXAMPLE, sort_keys=True)}\n"
        f"Knowledge:\n" + ("\n".join(lines) or "(none)") + "\n"
        f"Query: {query}\n")
    text = gateway.complete(CompletionRequest(prompt=prompt, tag="dsl.translate"))
    try:
        raw = extract_json(text)
    except ValueError as exc:
        raise InvalidModelOutput(str(exc)) from exc
    catalog = catalog_from_knowledge(knowledge, profile)
    return validate_dsl(raw, catalog)


# --- SQL rendering ------------------------------------------------------------------

def _sql_literal(value: Any) -> str:
    if isinstance(value, bool):
        return "TRUE" if value else "FALSE"
    if isinstance(value, (int, float)):
        return repr(value)
    if value is None:
        return "NULL"
    escaped = str(value).replace("'", "''")
    return f"'{escaped}'"


def _render_default(column: str, operator: str, literal: Any) -> str:
    return f"{column} {operator.upper()} {_sql_literal(literal)}"


def _render_in(column: str, operator: str, literal: Any) -> str:
    values = literal if isinstance(literal, (list, tuple)) else [literal]
    inner = ", ".join(_sql_literal(v) for v in values)
    return f"{column} IN ({inner})"


def _render_between(column: str, operator: str, literal: Any) -> str:
    if isinstance(literal, str) and ".." in literal:
        lo, hi = literal.split("..", 1)
    elif isinstance(literal, (list, tuple)) and len(literal) == 2:
        lo, hi = literal
    else:
        raise UnsupportedOperator(
            f"between needs a [low, high] pair, got {literal!r}")
    return f"{column} BETWEEN {_sql_literal(lo)} AND {_sql_literal(hi)}"


def register_operator(name: str, renderer) -> None:
    _OPERATORS[name] = renderer


for op in ("=", "!=", "<", "<=", ">", ">="):
    register_operator(op, _render_default)
register_operator("like", lambda c, o, l: f"{c} LIKE {_sql_literal(l)}")
register_operator("in", _render_in)
register_operator("between", _render_between)


def _measure_sql(measure: Measure) -> str:
    if measure.aggregation == "count_distinct":
        return f"COUNT(DISTINCT {measure.column})"
    return f"{measure.aggregation.upper()}({measure.column})"


def dsl_to_sql(spec: DSLSpec, table: str) -> str:
    """Deterministic rule-based SQL rendering of a validated spec."""
    select_items = [d.column for d in spec.dimensions]
    select_items += [_measure_sql(m) for m in spec.measures]
    if not select_items:
        select_items = ["*"]
    sql = f"SELECT {', '.join(select_items)} FROM {table}"
    if spec.conditions:
        rendered = []
        for cond in spec.conditions:
            renderer = _OPERATORS.get(cond.operator)
            if renderer is None:
                raise UnsupportedOperator(f"operator {cond.operator!r} not registered")
            rendered.append(renderer(cond.column, cond.operator, cond.literal))
        sql += " WHERE " + " AND ".join(rendered)
    if spec.dimensions and spec.measures:
        sql += " GROUP BY " + ", ".join(d.column for d in spec.dimensions)
    if spec.order:
        sql += " ORDER BY " + ", ".join(
            f"{o.column} {o.direction.upper()}" for o in spec.order)
    if spec.limit is not None:
        sql += f" LIMIT {spec.limit}"
    return sql


# --- chart rendering -----------------------------------------------------------------

def dsl_to_vis(spec: DSLSpec, data_name: str = "data") -> dict[str, Any]:
    """Rule-table chart grammar rendering.

    ``>=1`` dimension: bar, or line when the first dimension is temporal
    (second dimension becomes color). No dimensions: scatter for two or more
    measures, single-bar for one. Zero measures are unchartable.
    """
    if not spec.measures:
        raise UnchartableSpec("a chart needs at least one measure")
    first_measure = spec.measures[0]
    y_encoding = {"field": first_measure.column,
                  "aggregate": first_measure.aggregation,
                  "type": "quantitative"}
    if spec.dimensions:
        dim = spec.dimensions[0]
        mark = "line" if dim.type == "temporal" else "bar"
        encoding: dict[str, Any] = {
            "x": {"field": dim.column,
                  "type": "temporal" if dim.type == "temporal" else "nominal"},
            "y": y_encoding,
        }
        if len(spec.dimensions) > 1:
            encoding["color"] = {"field": spec.dimensions[1].column,
                                 "type": "nominal"}
    elif len(spec.measures) >= 2:
        mark = "point"
        second = spec.measures[1]
        encoding = {
            "x": {"field": first_measure.column,
                  "aggregate": first_measure.aggregation,
                  "type": "quantitative"},
            "y": {"field": second.column, "aggregate": second.aggregation,
                  "type": "quantitative"},
        }
    else:
        mark = "bar"
        encoding = {"y": y_encoding}
    return {"grammar": "askbook/chart/v1", "data": {"name": data_name},
            "mark": mark, "encoding": encoding}


def validate_chart_spec(obj: Any) -> dict[str, Any]:
    """Structural check for rendered chart specs; raises UnchartableSpec."""
    if not isinstance(obj, dict):
        raise UnchartableSpec("chart spec must be an object")
    if obj.get("grammar") != "askbook/chart/v1":
        raise UnchartableSpec("unknown chart grammar")
    if obj.get("mark") not in ("bar", "line", "point"):
        raise UnchartableSpec(f"unknown mark {obj.get('mark')!r}")
    encoding = obj.get("encoding")
    if not isinstance(encoding, dict) or "y" not in encoding:
        raise UnchartableSpec("chart spec needs a y encoding")
    return obj
