"""Data types for knowledge generation: script history, schema, lineage,
knowledge bundles, and table profiles."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Script:
    id: str
    language: str            # "SQL" | "Python"
    text: str
    last_run: str            # ISO timestamp; lexical order == temporal order

    def to_json(self) -> dict[str, Any]:
        return {"id": self.id, "language": self.language, "text": self.text,
                "last_run": self.last_run}

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "Script":
        return Script(id=obj["id"], language=obj["language"], text=obj["text"],
                      last_run=obj["last_run"])


@dataclass(frozen=True)
class ScriptHistory:
    scripts: tuple[Script, ...]
    table_ref: str = ""

    def __post_init__(self) -> None:
        ids = [s.id for s in self.scripts]
        if len(ids) != len(set(ids)):
            raise ValueError("script ids must be unique")


@dataclass(frozen=True)
class ColumnDecl:
    name: str
    declared_type: str = "string"


@dataclass(frozen=True)
class SchemaInfo:
    database: str
    table: str
    columns: tuple[ColumnDecl, ...]

    def __post_init__(self) -> None:
        names = [c.name for c in self.columns]
        if len(names) != len(set(names)):
            raise ValueError("column names must be unique within a table")

    def column_names(self) -> set[str]:
        return {c.name for c in self.columns}

    def to_json(self) -> dict[str, Any]:
        return {"database": self.database, "table": self.table,
                "columns": [{"name": c.name, "declared_type": c.declared_type}
                            for c in self.columns]}

    @staticmethod
    def from_json(obj: dict[str, Any]) -> "SchemaInfo":
        return SchemaInfo(
            database=obj["database"], table=obj["table"],
            columns=tuple(ColumnDecl(c["name"], c.get("declared_type", "string"))
                          for c in obj["columns"]))


@dataclass(frozen=True)
class LineageInfo:
    """Upstream -> downstream column-level relationships, consumed as input."""

    edges: tuple[tuple[str, str], ...] = ()

    def to_json(self) -> list[list[str]]:
        return [list(e) for e in self.edges]

    @staticmethod
    def from_json(rows: list) -> "LineageInfo":
        return LineageInfo(edges=tuple((r[0], r[1]) if isinstance(r, list)
                                       else (r["upstream"], r["downstream"])
                                       for r in rows))


@dataclass(frozen=True)
class DerivedColumn:
    name: str
    description: str
    usage: str
    calculation_logic: str
    related_columns: tuple[str, ...]
    tags: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "description": self.description,
                "usage": self.usage, "calculation_logic": self.calculation_logic,
                "related_columns": list(self.related_columns),
                "tags": list(self.tags)}


@dataclass(frozen=True)
class ColumnKnowledge:
    description: str
    usage: str
    type: str = "string"
    tags: tuple[str, ...] = ()
    derived: tuple[DerivedColumn, ...] = ()
    aliases: tuple[str, ...] = ()
    values: tuple[str, ...] = ()

    def to_json(self) -> dict[str, Any]:
        obj: dict[str, Any] = {"description": self.description, "usage": self.usage,
                               "type": self.type, "tags": list(self.tags)}
        if self.derived:
            obj["derived"] = [d.to_json() for d in self.derived]
        if self.aliases:
            obj["aliases"] = list(self.aliases)
        if self.values:
            obj["values"] = list(self.values)
        return obj


@dataclass(frozen=True)
class KnowledgeBundle:
    """Generated knowledge for one table and its columns.

    ``database_name``/``table_name`` come from the schema so the bundle can be
    addressed into the knowledge graph.
    """

    database_name: str
    table_name: str
    database: dict[str, Any]        # description, usage, tags
    table: dict[str, Any]           # description, usage, organization,
                                    # key_column_names, key_derived_attribute_names, tags
    columns: dict[str, ColumnKnowledge]

    def column_names(self) -> set[str]:
        return set(self.columns)

    def derived_names(self) -> set[str]:
        return {d.name for ck in self.columns.values() for d in ck.derived}

    def to_json(self) -> dict[str, Any]:
        return {"database_name": self.database_name, "table_name": self.table_name,
                "database": self.database, "table": self.table,
                "columns": {name: ck.to_json() for name, ck in self.columns.items()}}


@dataclass(frozen=True)
class GenConfig:
    score_threshold: int = 4
    max_attempts: int = 3
    dedup_similarity: float = 0.9

    def __post_init__(self) -> None:
        if not 1 <= self.score_threshold <= 5:
            raise ValueError("score_threshold must be in [1, 5]")
        if self.max_attempts <= 0:
            raise ValueError("max_attempts must be positive")
        if not 0.0 <= self.dedup_similarity <= 1.0:
            raise ValueError("dedup_similarity must be in [0, 1]")


@dataclass(frozen=True)
class ColumnProfile:
    name: str
    inferred_type: str               # integer | float | string | date | boolean
    min: Any = None
    max: Any = None
    null_count: int = 0
    distinct_count: int = 0
    samples: tuple = ()

    def to_json(self) -> dict[str, Any]:
        return {"name": self.name, "inferred_type": self.inferred_type,
                "min": self.min, "max": self.max, "null_count": self.null_count,
                "distinct_count": self.distinct_count, "samples": list(self.samples)}


@dataclass(frozen=True)
class TableProfile:
    columns: tuple[ColumnProfile, ...]
    row_count: int

    def to_json(self) -> dict[str, Any]:
        return {"columns": [c.to_json() for c in self.columns],
                "row_count": self.row_count}
