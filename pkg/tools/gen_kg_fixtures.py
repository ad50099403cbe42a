#!/usr/bin/env python3
"""Regenerate the committed knowledge-generation replay fixture.

One SQL script over the sales table; the fixture pins the map draft, its
calibration score, and the reduce result by prompt fingerprint, so
``askbook kg generate`` replays the whole loop offline.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from askbook.gateway import ReplayFixture  # noqa: E402
from askbook.knowledge.generate import (  # noqa: E402
    _map_prompt,
    _reduce_prompt,
    _score_prompt,
    validate_bundle,
)
from askbook.knowledge.types import LineageInfo, SchemaInfo, Script  # noqa: E402

OUT = ROOT / "tests" / "data" / "kg_fixtures"

SCHEMA = {
    "database": "bi_dw",
    "table": "sales_daily",
    "columns": [
        {"name": "prod_class4_name", "declared_type": "string"},
        {"name": "shouldincome_after", "declared_type": "float"},
        {"name": "ftime", "declared_type": "date"},
    ],
}

SCRIPT = {
    "id": "s_income_by_product",
    "language": "SQL",
    "text": "SELECT prod_class4_name, SUM(shouldincome_after) AS income "
            "FROM sales_daily WHERE ftime >= '2024-01-01' "
            "GROUP BY prod_class4_name",
    "last_run": "2024-05-20T08:00:00",
}

LINEAGE = [["raw.sales.amount", "bi_dw.sales_daily.shouldincome_after"]]

# Only the two columns the script touches; ftime appears in a filter but the
# scripted draft deliberately documents the selected columns only, matching
# the committed expectation "others absent".
BUNDLE = {
    "database": {"description": "business intelligence warehouse",
                 "usage": "company-wide reporting", "tags": ["dw"]},
    "table": {"description": "daily sales facts per product line",
              "usage": "revenue reporting", "organization": "partitioned by day",
              "key_column_names": ["prod_class4_name"],
              "key_derived_attribute_names": [], "tags": ["sales"]},
    "columns": {
        "prod_class4_name": {
            "description": "fourth-level product classification name",
            "usage": "group revenue by product line", "type": "string",
            "tags": ["dimension"]},
        "shouldincome_after": {
            "description": "net income amount after adjustments",
            "usage": "summed for revenue figures", "type": "float",
            "tags": ["measure"]},
    },
}


def main() -> None:
    OUT.mkdir(parents=True, exist_ok=True)
    schema = SchemaInfo.from_json(SCHEMA)
    script = Script.from_json(SCRIPT)
    lineage = LineageInfo.from_json(LINEAGE)
    draft = validate_bundle(BUNDLE, schema)

    fixture = ReplayFixture()
    fixture.add(_map_prompt(script, schema, lineage), json.dumps(BUNDLE),
                prompt_tokens=180, completion_tokens=140)
    fixture.add(_score_prompt(draft), "score: 5",
                prompt_tokens=150, completion_tokens=4)
    fixture.add(_reduce_prompt([draft], schema, lineage), json.dumps(BUNDLE),
                prompt_tokens=220, completion_tokens=140)
    fixture.dump(OUT)

    (OUT / "schema.json").write_text(
        json.dumps(SCHEMA, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (OUT / "scripts.jsonl").write_text(
        json.dumps(SCRIPT, sort_keys=True) + "\n", encoding="utf-8")
    (OUT / "lineage.jsonl").write_text(
        "\n".join(json.dumps(row) for row in LINEAGE) + "\n", encoding="utf-8")
    print(f"wrote kg replay fixture to {OUT}")


if __name__ == "__main__":
    main()
