"""Data profiling fallback: heuristic column statistics plus model
interpretation, used when graph retrieval comes back empty."""

from __future__ import annotations

import json
import random
import re
from datetime import date, datetime
from typing import Any, Mapping, Sequence

from ..errors import EmptyTable, InvalidModelOutput
from ..gateway import CompletionRequest, Gateway
from ..jsonutil import extract_json
from .types import ColumnProfile, TableProfile

_MAX_SAMPLES = 10

_INT_RE = re.compile(r"^[+-]?\d+$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?$")
_DATE_RE = re.compile(r"^\d{4}-\d{2}-\d{2}([T ].*)?$")
_BOOL_STRINGS = {"true", "false"}


def _columnize(rows: Sequence[Mapping[str, Any]] | Mapping[str, Sequence[Any]],
               ) -> tuple[list[str], dict[str, list[Any]], int]:
    if isinstance(rows, Mapping):
        names = list(rows.keys())
        columns = {name: list(values) for name, values in rows.items()}
        row_count = max((len(v) for v in columns.values()), default=0)
        for values in columns.values():
            values.extend([None] * (row_count - len(values)))
        return names, columns, row_count
    names = []
    for row in rows:
        for key in row:
            if key not in names:
                names.append(key)
    columns = {name: [row.get(name) for row in rows] for name in names}
    return names, columns, len(rows)


def _infer_type(values: list[Any]) -> str:
    """integer | float | date | boolean | string, judged over non-nulls.
    Numeric strings coerce; a mix of ints and floats is float."""
    if not values:
        return "string"
    kinds = set()
    for value in values:
        if isinstance(value, bool):
            kinds.add("boolean")
        elif isinstance(value, int):
            kinds.add("integer")
        elif isinstance(value, float):
            kinds.add("float")
        elif isinstance(value, (date, datetime)):
            kinds.add("date")
        elif isinstance(value, str):
            text = value.strip()
            if _INT_RE.match(text):
                kinds.add("integer")
            elif _FLOAT_RE.match(text):
                kinds.add("float")
            elif _DATE_RE.match(text):
                kinds.add("date")
            elif text.lower() in _BOOL_STRINGS:
                kinds.add("boolean")
            else:
                return "string"
        else:
            return "string"
    if kinds <= {"integer"}:
        return "integer"
    if kinds <= {"integer", "float"}:
        return "float"
    if len(kinds) == 1:
        return kinds.pop()
    return "string"


def _as_number(value: Any) -> float:
    if isinstance(value, str):
        return float(value)
    return float(value)


def profile_table(rows: Sequence[Mapping[str, Any]] | Mapping[str, Sequence[Any]],
                  seed: int = 0) -> TableProfile:
    """Heuristic profile: per-column type, min/max, null and distinct counts,
    and up to ten uniformly sampled values. Deterministic for a given seed;
    statistics ignore nulls. Raises EmptyTable for zero columns.
    """
    names, columns, row_count = _columnize(rows)
    if not names:
        raise EmptyTable("table has no columns")
    profiles = []
    for name in names:
        values = columns[name]
        non_null = [v for v in values if v is not None]
        inferred = _infer_type(non_null)
        lo = hi = None
        if non_null and inferred in ("integer", "float"):
            numbers = [_as_number(v) for v in non_null]
            lo, hi = min(numbers), max(numbers)
            if inferred == "integer":
                lo, hi = int(lo), int(hi)
        elif non_null and inferred == "date":
            as_text = [str(v) for v in non_null]
            lo, hi = min(as_text), max(as_text)
        rng = random.Random((seed, name).__repr__())
        pool = sorted({repr(v): v for v in non_null}.items())
        chosen = rng.sample(pool, min(_MAX_SAMPLES, len(pool)))
        profiles.append(ColumnProfile(
            name=name, inferred_type=inferred, min=lo, max=hi,
            null_count=len(values) - len(non_null),
            distinct_count=len(pool),
            samples=tuple(v for _, v in chosen)))
    return TableProfile(columns=tuple(profiles), row_count=row_count)


def interpret_profile(profile: TableProfile, gateway: Gateway,
                      ) -> dict[str, Any]:
    """Model interpretation of a profile: an overall table description plus
    one description per column, in profile column order."""
    if not profile.columns:
        raise EmptyTable("profile has no columns")
    prompt = (
        "Given the table profile below, describe the table and each column "
        "semantically. Reply with JSON {\"table_description\": str, "
        "\"column_descriptions\": {<column name>: str}} covering every column.\n\n"
        f"Profile: {json.dumps(profile.to_json(), sort_keys=True)}\n")
    text = gateway.complete(CompletionRequest(prompt=prompt, tag="profile.interpret"))
    try:
        raw = extract_json(text)
    except ValueError as exc:
        raise InvalidModelOutput(str(exc)) from exc
    if not isinstance(raw, dict) or "table_description" not in raw:
        raise InvalidModelOutput("interpretation missing table_description")
    described = raw.get("column_descriptions")
    if not isinstance(described, dict):
        raise InvalidModelOutput("interpretation missing column_descriptions")
    ordered: dict[str, str] = {}
    for column in profile.columns:
        if column.name not in described:
            raise InvalidModelOutput(f"no description for column {column.name!r}")
        ordered[column.name] = str(described[column.name])
    return {"table_description": str(raw["table_description"]),
            "column_descriptions": ordered}
