import pytest

from askbook.agents.units import InformationUnit, Payload, PayloadKind, SharedBuffer
from askbook.context.dag import build_dag
from askbook.context.retrieve import (
    ContextBundle,
    QueryScope,
    TaskType,
    markdown_similarity,
    prune_by_task,
    retrieve_context,
)
from askbook.errors import UnknownCell, UnknownVariable
from askbook.gateway import Gateway, SequenceProvider
from askbook.notebook import Cell, CellKind, Notebook

from helpers.oracle import oracle_ancestors, oracle_descendants, oracle_similarity


def sql(cid, source, binding=None):
    return Cell(id=cid, kind=CellKind.SQL, source=source, binding=binding)


def py(cid, source):
    return Cell(id=cid, kind=CellKind.PYTHON, source=source)


def chart(cid, binding):
    return Cell(id=cid, kind=CellKind.CHART, source="", binding=binding)


def md(cid, text):
    return Cell(id=cid, kind=CellKind.MARKDOWN, source=text)


def unit(source, role="SQL Agent", action="generate_sql_query", ts=1):
    return InformationUnit(data_source=source, role=role, action=action,
                           description=f"{action} on {source}",
                           content=Payload(PayloadKind.SQL, "SELECT 1"),
                           timestamp=ts)


CHAIN = Notebook(id="n", revision=1, cells=(
    sql("c1", "SELECT a FROM t", "df1"),
    py("c2", "other = 1"),
    chart("c3", "df1"),
))


class TestPrune:
    def test_nl2dscode_keeps_python_plus_defining_cell(self):
        cells = [sql("s", "SELECT 1", "df"), py("p", "x=1"), chart("ch", "df")]
        kept = prune_by_task(cells, TaskType.NL2DSCODE, keep="s")
        assert [c.id for c in kept] == ["s", "p"]

    def test_nl2sql_keeps_sql(self):
        cells = [sql("s", "SELECT 1", "df"), py("p", "x=1"), chart("ch", "df")]
        assert [c.id for c in prune_by_task(cells, TaskType.NL2SQL)] == ["s"]

    def test_nl2vis_keeps_sql_python_chart(self):
        cells = [sql("s", "SELECT 1", "df"), py("p", "x=1"), chart("ch", "df"),
                 md("m", "note")]
        assert [c.id for c in prune_by_task(cells, TaskType.NL2VIS)] == ["s", "p", "ch"]

    def test_insight_keeps_all(self):
        cells = [sql("s", "SELECT 1", "df"), md("m", "note")]
        assert prune_by_task(cells, TaskType.NL2INSIGHT) == cells

    def test_empty_list(self):
        assert prune_by_task([], TaskType.NL2SQL) == []

    def test_order_preserved(self):
        cells = [py(f"p{i}", "x=1") for i in range(4)] + [sql("s", "SELECT 1")]
        kept = prune_by_task(cells, TaskType.NL2VIS)
        assert [c.id for c in kept] == ["p0", "p1", "p2", "p3", "s"]


class TestCellLevel:
    def test_anchor_plus_ancestors_only(self):
        dag = build_dag(CHAIN)
        scope = QueryScope(level="cell", anchor_cell="c3", task_type=TaskType.NL2VIS)
        bundle = retrieve_context(dag, CHAIN, scope, "chart the income")
        # c2 is not an ancestor of c3; ancestors of c3 = {c1}
        assert [c.id for c in bundle.cells] == ["c1", "c3"]

    def test_matches_ancestor_oracle(self):
        dag = build_dag(CHAIN)
        expected = oracle_ancestors(set(dag.edges), "c3") | {"c3"}
        scope = QueryScope(level="cell", anchor_cell="c3",
                           task_type=TaskType.NL2INSIGHT)
        bundle = retrieve_context(dag, CHAIN, scope, "anything")
        assert {c.id for c in bundle.cells} == expected

    def test_unknown_anchor(self):
        dag = build_dag(CHAIN)
        scope = QueryScope(level="cell", anchor_cell="zz")
        with pytest.raises(UnknownCell):
            retrieve_context(dag, CHAIN, scope, "q")

    def test_cells_in_document_order(self):
        nb = Notebook(id="n", revision=1, cells=(
            py("a", "x = 1"), py("b", "y = x"), py("c", "z = y + x")))
        dag = build_dag(nb)
        scope = QueryScope(level="cell", anchor_cell="c",
                           task_type=TaskType.NL2DSCODE)
        bundle = retrieve_context(dag, nb, scope, "q")
        assert [c.id for c in bundle.cells] == ["a", "b", "c"]


class TestNotebookLevel:
    def test_descendants_of_first_definition_restricted_to_python(self):
        nb = Notebook(id="n", revision=1, cells=(
            sql("c1", "SELECT a FROM t", "df1"),
            py("c2", "stats = df1.sum()"),
            chart("c3", "df1"),
            py("c4", "unrelated = 2"),
        ))
        dag = build_dag(nb)
        scope = QueryScope(level="notebook", data_variable="df1",
                           task_type=TaskType.NL2DSCODE)
        bundle = retrieve_context(dag, nb, scope, "transform the data")
        expected = oracle_descendants(set(dag.edges), "c1") | {"c1"}
        # pruned to python cells plus the defining cell c1
        assert {c.id for c in bundle.cells} == {"c1", "c2"}
        assert {c.id for c in bundle.cells} <= expected

    def test_empty_notebook_raises_unknown_variable(self):
        nb = Notebook(id="n", revision=1, cells=())
        dag = build_dag(nb)
        scope = QueryScope(level="notebook", data_variable=None)
        with pytest.raises(UnknownVariable):
            retrieve_context(dag, nb, scope, "anything")

    def test_undefined_variable_raises(self):
        dag = build_dag(CHAIN)
        scope = QueryScope(level="notebook", data_variable="ghost")
        with pytest.raises(UnknownVariable):
            retrieve_context(dag, CHAIN, scope, "q")

    def test_llm_prediction_resolves_variable(self):
        dag = build_dag(CHAIN)
        gateway = Gateway(SequenceProvider({"context.predict_var": ["df1"]}))
        scope = QueryScope(level="notebook", task_type=TaskType.NL2VIS)
        bundle = retrieve_context(dag, CHAIN, scope, "plot it", gateway=gateway)
        assert {c.id for c in bundle.cells} == {"c1", "c3"}

    def test_llm_prediction_of_unknown_name_raises(self):
        dag = build_dag(CHAIN)
        gateway = Gateway(SequenceProvider({"context.predict_var": ["nope"]}))
        scope = QueryScope(level="notebook")
        with pytest.raises(UnknownVariable):
            retrieve_context(dag, CHAIN, scope, "plot it", gateway=gateway)


class TestMarkdownSimilarity:
    def test_similarity_matches_oracle(self):
        pairs = [("monthly revenue report", "show revenue by month"),
                 ("cleanup joins", "plot revenue"),
                 ("", "query"), ("words here", "")]
        for text, query in pairs:
            assert markdown_similarity(text, query) == pytest.approx(
                oracle_similarity(text, query))

    def test_similar_markdown_joins_bundle_regardless_of_task(self):
        nb = Notebook(id="n", revision=1, cells=(
            sql("c1", "SELECT a FROM t", "df1"),
            md("m1", "income revenue analysis for product lines"),
            md("m2", "completely unrelated scribbles"),
            py("c2", "x = df1"),
        ))
        dag = build_dag(nb)
        scope = QueryScope(level="cell", anchor_cell="c2",
                           task_type=TaskType.NL2DSCODE)
        bundle = retrieve_context(dag, nb, scope, "income revenue by product")
        ids = [c.id for c in bundle.cells]
        assert "m1" in ids
        assert "m2" not in ids
        assert "c1" not in ids  # python-only pruning drops the SQL ancestor

    def test_scoped_variable_definer_protected_at_cell_level(self):
        nb = Notebook(id="n", revision=1, cells=(
            sql("c1", "SELECT a FROM t", "df1"),
            py("c2", "x = df1"),
        ))
        dag = build_dag(nb)
        scope = QueryScope(level="cell", anchor_cell="c2", data_variable="df1",
                           task_type=TaskType.NL2DSCODE)
        bundle = retrieve_context(dag, nb, scope, "transform")
        assert [c.id for c in bundle.cells] == ["c1", "c2"]


class TestUnitsAndTokens:
    def test_units_attached_when_data_source_in_bundle(self):
        dag = build_dag(CHAIN)
        buffer = SharedBuffer()
        buffer.put(unit("df1", ts=1))
        buffer.put(unit("elsewhere", role="DS Agent",
                        action="generate_python_code", ts=2))
        scope = QueryScope(level="cell", anchor_cell="c3",
                           task_type=TaskType.NL2VIS)
        bundle = retrieve_context(dag, CHAIN, scope, "plot", buffer=buffer)
        assert [u.data_source for u in bundle.units] == ["df1"]

    def test_token_estimate_is_chars_over_four(self):
        dag = build_dag(CHAIN)
        scope = QueryScope(level="cell", anchor_cell="c3",
                           task_type=TaskType.NL2VIS)
        bundle = retrieve_context(dag, CHAIN, scope, "plot")
        chars = sum(len(c.source) for c in bundle.cells)
        assert bundle.token_estimate == chars // 4

    def test_determinism(self):
        dag = build_dag(CHAIN)
        buffer = SharedBuffer()
        buffer.put(unit("df1"))
        scope = QueryScope(level="cell", anchor_cell="c3",
                           task_type=TaskType.NL2VIS)
        first = retrieve_context(dag, CHAIN, scope, "plot", buffer=buffer)
        second = retrieve_context(dag, CHAIN, scope, "plot", buffer=buffer)
        assert first == second
        assert isinstance(first, ContextBundle)
