import json

import pytest

from askbook.errors import OrphanNode
from askbook.knowledge.generate import validate_bundle
from askbook.knowledge.graph import (
    KnowledgeGraph,
    KnowledgeNode,
    NodeType,
    column_id,
    upsert_knowledge,
)
from askbook.knowledge.types import ColumnDecl, SchemaInfo

SCHEMA = SchemaInfo(database="bi_dw", table="sales_daily", columns=(
    ColumnDecl("prod_class4_name", "string"),
    ColumnDecl("shouldincome_after", "float"),
    ColumnDecl("ftime", "date"),
))


def fixture_bundle(aliases=True):
    cols = {
        "prod_class4_name": {
            "description": "fourth-level product classification name",
            "usage": "group revenue by product line", "type": "string",
            "tags": ["dimension"],
            "values": ["TencentBI", "TencentDoc"],
        },
        "shouldincome_after": {
            "description": "net income amount after adjustments",
            "usage": "sum for revenue reporting", "type": "float",
            "tags": ["measure"],
            "derived": [{
                "name": "net_margin", "description": "income per unit",
                "usage": "profitability", "calculation_logic":
                    "shouldincome_after / nullif(shouldincome_after, 0)",
                "related_columns": ["shouldincome_after"], "tags": [],
            }],
        },
        "ftime": {"description": "business date of the record",
                  "usage": "time filters", "type": "date", "tags": ["time"]},
    }
    if aliases:
        cols["shouldincome_after"]["aliases"] = ["revenue", "income"]
    raw = {
        "database": {"description": "bi warehouse", "usage": "reporting",
                     "tags": ["dw"]},
        "table": {"description": "daily sales facts", "usage": "bi reports",
                  "organization": "partitioned by ftime",
                  "key_column_names": ["prod_class4_name"],
                  "key_derived_attribute_names": ["net_margin"], "tags": []},
        "columns": cols,
    }
    return validate_bundle(raw, SCHEMA)


def test_upsert_creates_expected_node_cardinality():
    graph = upsert_knowledge(KnowledgeGraph(), fixture_bundle(aliases=False))
    by_type = {}
    for node in graph.nodes.values():
        by_type.setdefault(node.type, []).append(node)
    assert len(by_type[NodeType.DATABASE]) == 1
    assert len(by_type[NodeType.TABLE]) == 1
    assert len(by_type[NodeType.COLUMN]) == 4   # 3 schema + 1 derived
    assert len(by_type[NodeType.VALUE]) == 2


def test_upsert_idempotent():
    graph = upsert_knowledge(KnowledgeGraph(), fixture_bundle())
    snapshot = {nid: json.dumps(n.to_json(), sort_keys=True)
                for nid, n in graph.nodes.items()}
    upsert_knowledge(graph, fixture_bundle())
    again = {nid: json.dumps(n.to_json(), sort_keys=True)
             for nid, n in graph.nodes.items()}
    assert snapshot == again


def test_alias_backtracks_to_primary_column():
    graph = upsert_knowledge(KnowledgeGraph(), fixture_bundle())
    aliases = [n for n in graph.nodes.values()
               if n.type is NodeType.ALIAS and n.name == "revenue"]
    assert len(aliases) == 1
    primary = graph.backtrack(aliases[0])
    assert primary.type is NodeType.COLUMN
    assert primary.name == "shouldincome_after"


def test_every_alias_has_exactly_one_target():
    graph = upsert_knowledge(KnowledgeGraph(), fixture_bundle())
    upsert_knowledge(graph, [{"term": "GMV", "description": "gross merch value",
                              "aliases": ["gross_value"]}])
    for node in graph.nodes.values():
        if node.type is NodeType.ALIAS:
            assert node.target in graph.nodes


def test_logical_edges_form_forest_rooted_at_databases():
    graph = upsert_knowledge(KnowledgeGraph(), fixture_bundle())
    for node in graph.nodes.values():
        if node.type is NodeType.ALIAS:
            continue
        seen = set()
        current = node
        while current.parent is not None:
            assert current.parent not in seen, "cycle in logical edges"
            seen.add(current.parent)
            current = graph.nodes[current.parent]
        assert current.type in (NodeType.DATABASE, NodeType.JARGON)


def test_derived_columns_tagged_with_calculation_logic():
    graph = upsert_knowledge(KnowledgeGraph(), fixture_bundle())
    derived = graph.get(column_id("bi_dw", "sales_daily", "net_margin"))
    assert derived is not None
    assert "derived" in derived.components["tags"]
    assert derived.components["calculation_logic"]


def test_glossary_entries_become_jargon_nodes():
    graph = upsert_knowledge(KnowledgeGraph(), [
        {"term": "DAU", "description": "daily active users", "aliases": ["actives"]},
    ])
    jargon = [n for n in graph.nodes.values() if n.type is NodeType.JARGON]
    assert [n.name for n in jargon] == ["DAU"]


def test_orphan_column_rejected():
    graph = KnowledgeGraph()
    with pytest.raises(OrphanNode):
        graph.add_node(KnowledgeNode(id="col:a.b.c", type=NodeType.COLUMN,
                                     name="c", parent="tbl:a.b"))


def test_alias_without_target_rejected():
    graph = KnowledgeGraph()
    with pytest.raises(OrphanNode):
        graph.add_node(KnowledgeNode(id="alias:x->y", type=NodeType.ALIAS,
                                     name="x", target="col:missing"))


def test_export_import_round_trip(tmp_path):
    graph = upsert_knowledge(KnowledgeGraph(), fixture_bundle())
    upsert_knowledge(graph, [{"term": "GMV", "description": "gross value"}])
    graph.export_jsonl(tmp_path / "nodes.jsonl", tmp_path / "edges.jsonl")
    loaded = KnowledgeGraph.import_jsonl(tmp_path / "nodes.jsonl")
    assert {n.id for n in loaded.nodes.values()} == {n.id for n in graph.nodes.values()}
    assert loaded.logical_edges() == graph.logical_edges()
    assert loaded.associative_edges() == graph.associative_edges()
