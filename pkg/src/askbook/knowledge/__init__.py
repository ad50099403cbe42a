from .types import (
    ColumnDecl,
    ColumnKnowledge,
    DerivedColumn,
    GenConfig,
    KnowledgeBundle,
    LineageInfo,
    SchemaInfo,
    Script,
    ScriptHistory,
    TableProfile,
)
from .generate import MapResult, map_generate, preprocess_scripts, reduce_synthesize, self_calibrate
from .profile import interpret_profile, profile_table
from .graph import KnowledgeGraph, KnowledgeNode, NodeType, upsert_knowledge
from .index import IndexEntry, KnowledgeIndexes, TASK_PROFILES, build_indexes
from .retrieve import (
    RetrievalConfig,
    ScoredNode,
    coarse_retrieve,
    fine_order,
    resolve_temporal,
    rewrite_query,
)
from .dsl import (
    Condition,
    Dimension,
    DSLSpec,
    Measure,
    OrderItem,
    dsl_to_sql,
    dsl_to_vis,
    translate_to_dsl,
    validate_chart_spec,
    validate_dsl,
)

__all__ = [
    "ColumnDecl",
    "ColumnKnowledge",
    "DerivedColumn",
    "GenConfig",
    "KnowledgeBundle",
    "LineageInfo",
    "SchemaInfo",
    "Script",
    "ScriptHistory",
    "TableProfile",
    "MapResult",
    "map_generate",
    "preprocess_scripts",
    "reduce_synthesize",
    "self_calibrate",
    "interpret_profile",
    "profile_table",
    "KnowledgeGraph",
    "KnowledgeNode",
    "NodeType",
    "upsert_knowledge",
    "IndexEntry",
    "KnowledgeIndexes",
    "TASK_PROFILES",
    "build_indexes",
    "RetrievalConfig",
    "ScoredNode",
    "coarse_retrieve",
    "fine_order",
    "resolve_temporal",
    "rewrite_query",
    "Condition",
    "Dimension",
    "DSLSpec",
    "Measure",
    "OrderItem",
    "dsl_to_sql",
    "dsl_to_vis",
    "translate_to_dsl",
    "validate_chart_spec",
    "validate_dsl",
]
