"""Map/Reduce knowledge generation over script history with self-calibration.

Each surviving script is mapped to a draft knowledge bundle by the model; a
second model call scores the draft 1-5 against correctness, comprehensiveness
and clarity, and drafts below the threshold are regenerated up to
``max_attempts`` times (the loop is bounded deliberately; the unbounded
variant cannot ship). The reduce phase aggregates all drafts into one
conflict-free bundle in a single call.

Structural validation drops keys outside the declared bundle shape and drops
column entries not present in the schema (the hallucination guard); missing
or empty required fields trigger a regeneration attempt.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from ..errors import InvalidModelOutput
from ..gateway import CompletionRequest, Gateway
from ..jsonutil import extract_json
from .types import (
    ColumnKnowledge,
    DerivedColumn,
    GenConfig,
    KnowledgeBundle,
    LineageInfo,
    SchemaInfo,
    Script,
    ScriptHistory,
)

_TOKEN_RE = re.compile(r"[a-z0-9_]+")
_SCORE_RE = re.compile(r"score\s*[:=]?\s*(-?\d+)", re.I)
_INT_RE = re.compile(r"(-?\d+)")

_DB_FIELDS = ("description", "usage", "tags")
_TABLE_FIELDS = ("description", "usage", "organization", "key_column_names",
                 "key_derived_attribute_names", "tags")
_COLUMN_FIELDS = ("description", "usage", "type", "tags", "derived",
                  "aliases", "values")
_DERIVED_FIELDS = ("name", "description", "usage", "calculation_logic",
                   "related_columns", "tags")


# --- preprocessing -----------------------------------------------------------

def _tokens(text: str) -> frozenset[str]:
    return frozenset(_TOKEN_RE.findall(text.lower()))


def token_jaccard(a: str, b: str) -> float:
    ta, tb = _tokens(a), _tokens(b)
    if not ta and not tb:
        return 1.0
    union = ta | tb
    return len(ta & tb) / len(union) if union else 0.0


def preprocess_scripts(history: ScriptHistory, cfg: GenConfig) -> ScriptHistory:
    """Drop duplicated or near-duplicate scripts, keeping the most recent of
    each group. Output is ordered most-recent-first."""
    by_recency = sorted(history.scripts, key=lambda s: (s.last_run, s.id),
                        reverse=True)
    survivors: list[Script] = []
    seen_texts: set[str] = set()
    for script in by_recency:
        if script.text in seen_texts:
            continue
        if any(token_jaccard(script.text, kept.text) >= cfg.dedup_similarity
               for kept in survivors):
            continue
        seen_texts.add(script.text)
        survivors.append(script)
    return ScriptHistory(scripts=tuple(survivors), table_ref=history.table_ref)


# --- structural validation ---------------------------------------------------

class _RetryableOutput(Exception):
    """Draft is structurally unusable; worth another generation attempt."""


def _require_text(obj: dict, key: str, where: str) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value.strip():
        raise _RetryableOutput(f"{where}.{key} missing or empty")
    return value


def _str_list(obj: dict, key: str) -> tuple[str, ...]:
    value = obj.get(key, [])
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list):
        return ()
    return tuple(str(v) for v in value)


def validate_bundle(raw: object, schema: SchemaInfo) -> KnowledgeBundle:
    """Coerce raw model JSON into a KnowledgeBundle.

    Unknown keys are dropped. Column entries outside the schema are dropped,
    as are derived entries whose related_columns stray outside it. Missing
    required text raises _RetryableOutput so the map loop can regenerate.
    """
    if not isinstance(raw, dict):
        raise _RetryableOutput("bundle is not an object")
    db_raw = raw.get("database")
    table_raw = raw.get("table")
    cols_raw = raw.get("columns")
    if not isinstance(db_raw, dict) or not isinstance(table_raw, dict) \
            or not isinstance(cols_raw, dict):
        raise _RetryableOutput("bundle missing database/table/columns sections")

    database = {"description": _require_text(db_raw, "description", "database"),
                "usage": _require_text(db_raw, "usage", "database"),
                "tags": list(_str_list(db_raw, "tags"))}
    table = {"description": _require_text(table_raw, "description", "table"),
             "usage": _require_text(table_raw, "usage", "table"),
             "organization": _require_text(table_raw, "organization", "table"),
             "key_column_names": list(_str_list(table_raw, "key_column_names")),
             "key_derived_attribute_names":
                 list(_str_list(table_raw, "key_derived_attribute_names")),
             "tags": list(_str_list(table_raw, "tags"))}

    known = schema.column_names()
    columns: dict[str, ColumnKnowledge] = {}
    for name, col_raw in cols_raw.items():
        if name not in known or not isinstance(col_raw, dict):
            continue   # hallucination guard: schema columns only
        derived: list[DerivedColumn] = []
        for d_raw in col_raw.get("derived", []) or []:
            if not isinstance(d_raw, dict):
                continue
            related = _str_list(d_raw, "related_columns")
            if not set(related) <= known:
                continue
            try:
                derived.append(DerivedColumn(
                    name=_require_text(d_raw, "name", "derived"),
                    description=_require_text(d_raw, "description", "derived"),
                    usage=_require_text(d_raw, "usage", "derived"),
                    calculation_logic=_require_text(d_raw, "calculation_logic",
                                                    "derived"),
                    related_columns=related,
                    tags=_str_list(d_raw, "tags")))
            except _RetryableOutput:
                continue
        columns[name] = ColumnKnowledge(
            description=_require_text(col_raw, "description", f"columns.{name}"),
            usage=_require_text(col_raw, "usage", f"columns.{name}"),
            type=str(col_raw.get("type", "string")),
            tags=_str_list(col_raw, "tags"),
            derived=tuple(derived),
            aliases=_str_list(col_raw, "aliases"),
            values=_str_list(col_raw, "values"))
    if not columns:
        raise _RetryableOutput("bundle names no schema columns")
    return KnowledgeBundle(database_name=schema.database, table_name=schema.table,
                           database=database, table=table, columns=columns)


# --- map phase ---------------------------------------------------------------

@dataclass(frozen=True)
class MapResult:
    bundle: KnowledgeBundle
    score: int
    attempts: int
    exhausted: bool       # True when every attempt scored below threshold


def _map_prompt(script: Script, schema: SchemaInfo, lineage: LineageInfo) -> str:
    return (
        "You are documenting a data warehouse. Analyze the script below and "
        "produce knowledge about the database, table, and columns it touches. "
        "Only describe databases, tables, and columns that actually appear in "
        "the provided schema; never invent column names.\n"
        "Reply with JSON of shape {\"database\": {description, usage, tags}, "
        "\"table\": {description, usage, organization, key_column_names, "
        "key_derived_attribute_names, tags}, \"columns\": {<name>: {description, "
        "usage, type, tags, derived: [{name, description, usage, "
        "calculation_logic, related_columns, tags}], aliases, values}}}.\n\n"
        f"Schema: {json.dumps(schema.to_json(), sort_keys=True)}\n"
        f"Lineage: {json.dumps(lineage.to_json())}\n"
        f"Script ({script.language}, id {script.id}):\n{script.text}\n")


def _score_prompt(bundle: KnowledgeBundle) -> str:
    return (
        "Rate the knowledge bundle below on a 1-5 scale considering "
        "correctness, comprehensiveness, and clarity.\n"
        "Examples of the scale:\n"
        "- {\"columns\": {\"x\": {\"description\": \"number\"}}} -> score: 2 "
        "(vague, no usage)\n"
        "- a bundle whose every column has a precise description, usage, and "
        "correct derived logic -> score: 5\n"
        "Reply with 'score: N'.\n\n"
        f"Bundle: {json.dumps(bundle.to_json(), sort_keys=True)}\n")


def self_calibrate(draft: KnowledgeBundle, gateway: Gateway) -> int:
    """Model-scored quality of a draft, clamped to [1, 5]."""
    text = gateway.complete(CompletionRequest(prompt=_score_prompt(draft),
                                              tag="knowgen.score"))
    match = _SCORE_RE.search(text) or _INT_RE.search(text)
    if not match:
        raise InvalidModelOutput(f"no score in calibration reply: {text[:80]!r}")
    return max(1, min(5, int(match.group(1))))


def map_generate(script: Script, schema: SchemaInfo, lineage: LineageInfo,
                 cfg: GenConfig, gateway: Gateway) -> MapResult:
    """Generate a draft bundle for one script, regenerating while the
    self-calibration score is below the threshold.

    Issues at most ``cfg.max_attempts`` generation calls and as many
    calibration calls. Returns the best-scoring draft; ``exhausted`` is set
    when the threshold was never reached. Raises InvalidModelOutput when no
    attempt produced parseable, structurally valid JSON.
    """
    prompt = _map_prompt(script, schema, lineage)
    best: tuple[int, KnowledgeBundle] | None = None
    parse_failures: list[str] = []
    for attempt in range(1, cfg.max_attempts + 1):
        text = gateway.complete(CompletionRequest(prompt=prompt, tag="knowgen.map"))
        try:
            bundle = validate_bundle(extract_json(text), schema)
        except (ValueError, _RetryableOutput) as exc:
            parse_failures.append(str(exc))
            continue
        score = self_calibrate(bundle, gateway)
        if best is None or score > best[0]:
            best = (score, bundle)
        if score >= cfg.score_threshold:
            return MapResult(bundle=bundle, score=score, attempts=attempt,
                             exhausted=False)
    if best is None:
        raise InvalidModelOutput(
            f"no valid bundle after {cfg.max_attempts} attempts: "
            f"{'; '.join(parse_failures)}")
    return MapResult(bundle=best[1], score=best[0], attempts=cfg.max_attempts,
                     exhausted=True)


# --- reduce phase ------------------------------------------------------------

def _reduce_prompt(drafts: list[KnowledgeBundle], schema: SchemaInfo,
                   lineage: LineageInfo) -> str:
    return (
        "Merge the draft knowledge bundles below into one consistent, "
        "conflict-free bundle of the same JSON shape. Keep every column that "
        "any draft mentions; reconcile contradictory descriptions.\n\n"
        f"Schema: {json.dumps(schema.to_json(), sort_keys=True)}\n"
        f"Lineage: {json.dumps(lineage.to_json())}\n"
        f"Drafts: {json.dumps([d.to_json() for d in drafts], sort_keys=True)}\n")


def reduce_synthesize(drafts: list[KnowledgeBundle], schema: SchemaInfo,
                      lineage: LineageInfo, gateway: Gateway) -> KnowledgeBundle:
    """Aggregate map-phase drafts into the final bundle with one model call.

    Every column mentioned in any draft must appear in the output; a reply
    that loses columns or fails validation raises InvalidModelOutput.
    """
    if not drafts:
        raise ValueError("reduce_synthesize requires at least one draft")
    text = gateway.complete(CompletionRequest(
        prompt=_reduce_prompt(drafts, schema, lineage), tag="knowgen.reduce"))
    try:
        merged = validate_bundle(extract_json(text), schema)
    except (ValueError, _RetryableOutput) as exc:
        raise InvalidModelOutput(f"reduce output invalid: {exc}") from exc
    required = set().union(*(d.column_names() for d in drafts))
    missing = required - merged.column_names()
    if missing:
        raise InvalidModelOutput(
            f"reduce output lost columns: {', '.join(sorted(missing))}")
    return merged
