#!/usr/bin/env python3
"""Regenerate the committed DSL fixture sets: 25 valid specs and 25 malformed
model outputs with the field each one violates."""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]

COLUMNS = ["prod_class4_name", "shouldincome_after", "ftime", "region",
           "quantity", "discount", "channel"]

VALID: list[dict] = []
for i in range(25):
    measure_col = ["shouldincome_after", "quantity", "discount"][i % 3]
    agg = ["sum", "avg", "min", "max", "count", "count_distinct"][i % 6]
    spec = {
        "MeasureList": [{"column": measure_col, "aggregation": agg}],
        "DimensionList": [],
        "ConditionList": [],
    }
    if i % 2 == 0:
        spec["DimensionList"].append({"column": "prod_class4_name",
                                      "type": "categorical"})
    if i % 4 == 0:
        spec["DimensionList"].append({"column": "region", "type": "categorical"})
    if i % 3 == 0:
        spec["ConditionList"].append({"column": "ftime", "operator": "between",
                                      "literal": ["2024-01-01", "2024-12-31"]})
    if i % 5 == 0:
        spec["ConditionList"].append({"column": "channel", "operator": "in",
                                      "literal": ["web", "app"]})
    if i % 7 == 0:
        spec["ConditionList"].append({"column": "prod_class4_name",
                                      "operator": "=", "literal": "TencentBI"})
    if i % 6 == 1:
        spec["OrderList"] = [{"column": measure_col, "direction": "desc"}]
    if i % 8 == 2:
        spec["LimitN"] = 10 + i
    VALID.append(spec)

MALFORMED: list[dict] = [
    {"spec": {"FooList": []}, "bad_field": "FooList"},
    {"spec": {"MeasureList": [], "DimensionList": []}, "bad_field": "ConditionList"},
    {"spec": {"MeasureList": "not a list", "DimensionList": [],
              "ConditionList": []}, "bad_field": "MeasureList"},
    {"spec": {"MeasureList": [{"column": "x"}], "DimensionList": [],
              "ConditionList": []}, "bad_field": "MeasureList.0.aggregation"},
    {"spec": {"MeasureList": [{"column": "x", "aggregation": "median"}],
              "DimensionList": [], "ConditionList": []},
     "bad_field": "MeasureList.0.aggregation"},
    {"spec": {"MeasureList": [{"column": "", "aggregation": "sum"}],
              "DimensionList": [], "ConditionList": []},
     "bad_field": "MeasureList.0.column"},
    {"spec": {"MeasureList": [], "DimensionList": [42], "ConditionList": []},
     "bad_field": "DimensionList.0"},
    {"spec": {"MeasureList": [], "DimensionList": [{"type": "categorical"}],
              "ConditionList": []}, "bad_field": "DimensionList.0"},
    {"spec": {"MeasureList": [], "DimensionList": [{"column": "a",
              "type": "ordinal"}], "ConditionList": []},
     "bad_field": "DimensionList.0"},
    {"spec": {"MeasureList": [], "DimensionList": [],
              "ConditionList": [{"column": "a", "operator": "~", "literal": 1}]},
     "bad_field": "ConditionList.0.operator"},
    {"spec": {"MeasureList": [], "DimensionList": [],
              "ConditionList": [{"operator": "=", "literal": 1}]},
     "bad_field": "ConditionList.0"},
    {"spec": {"MeasureList": [], "DimensionList": [],
              "ConditionList": [{"column": "a", "literal": 1}]},
     "bad_field": "ConditionList.0"},
    {"spec": {"MeasureList": [], "DimensionList": [], "ConditionList": [],
              "OrderList": [{"direction": "asc"}]},
     "bad_field": "OrderList.0"},
    {"spec": {"MeasureList": [], "DimensionList": [], "ConditionList": [],
              "OrderList": [{"column": "a", "direction": "sideways"}]},
     "bad_field": "OrderList.0.direction"},
    {"spec": {"MeasureList": [], "DimensionList": [], "ConditionList": [],
              "LimitN": 0}, "bad_field": "LimitN"},
    {"spec": {"MeasureList": [], "DimensionList": [], "ConditionList": [],
              "LimitN": "ten"}, "bad_field": "LimitN"},
    {"spec": {"MeasureList": [], "DimensionList": [], "ConditionList": [],
              "extra": True}, "bad_field": "extra"},
    {"spec": [], "bad_field": "$"},
    {"spec": {"MeasureList": [{"column": "x", "aggregation": "sum",
              "alias": "t"}], "DimensionList": [], "ConditionList": []},
     "bad_field": "MeasureList.0.alias"},
    {"spec": {"MeasureList": [], "DimensionList": [],
              "ConditionList": [{"column": "a", "operator": "=", "literal": 1,
                                 "note": "x"}]},
     "bad_field": "ConditionList.0.note"},
    {"spec": {"MeasureList": [], "DimensionList": [""],
              "ConditionList": []}, "bad_field": "DimensionList.0"},
    {"spec": {"MeasureList": [{"column": 5, "aggregation": "sum"}],
              "DimensionList": [], "ConditionList": []},
     "bad_field": "MeasureList.0.column"},
    {"spec": {"MeasureList": [], "DimensionList": [],
              "ConditionList": "where x=1"}, "bad_field": "ConditionList"},
    {"spec": {"MeasureList": [], "DimensionList": {},
              "ConditionList": []}, "bad_field": "DimensionList"},
    {"spec": {"DimensionList": [], "ConditionList": []},
     "bad_field": "MeasureList"},
]


def main() -> None:
    out = ROOT / "tests" / "data" / "dsl"
    out.mkdir(parents=True, exist_ok=True)
    (out / "valid.jsonl").write_text(
        "\n".join(json.dumps(s, sort_keys=True) for s in VALID) + "\n",
        encoding="utf-8")
    (out / "malformed.jsonl").write_text(
        "\n".join(json.dumps(s, sort_keys=True) for s in MALFORMED) + "\n",
        encoding="utf-8")
    print(f"wrote {len(VALID)} valid and {len(MALFORMED)} malformed fixtures")
    assert len(VALID) == 25 and len(MALFORMED) == 25


if __name__ == "__main__":
    main()
