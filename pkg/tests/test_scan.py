import pytest

from askbook.context.scan import extract_cell_variables, python_scan, sql_table_identifiers
from askbook.errors import CellSyntaxError
from askbook.notebook import Cell, CellKind


def cell(kind, source="", binding=None, cid="c1"):
    return Cell(id=cid, kind=kind, source=source, binding=binding)


class TestPythonScan:
    def test_local_names_excluded(self):
        defined, referenced = python_scan("x = 1\ndef f(y): z = y")
        assert defined == {"x", "f"}
        assert referenced == set()

    def test_free_names(self):
        defined, referenced = python_scan("g(df1)")
        assert defined == set()
        assert referenced == {"g", "df1"}

    def test_use_before_module_def_counts_as_reference(self):
        defined, referenced = python_scan("y = x\nx = 1")
        assert defined == {"y", "x"}
        assert "x" in referenced

    def test_use_after_module_def_is_internal(self):
        defined, referenced = python_scan("x = 1\ny = x")
        assert defined == {"x", "y"}
        assert referenced == set()

    def test_imports_define(self):
        defined, referenced = python_scan("import pandas as pd\nfrom pathlib import Path")
        assert defined == {"pd", "Path"}
        assert referenced == set()

    def test_function_body_free_name_deferred(self):
        defined, referenced = python_scan("def f():\n    return helper(seed)")
        assert defined == {"f"}
        assert referenced == {"helper", "seed"}

    def test_function_body_resolves_against_later_module_def(self):
        defined, referenced = python_scan("def f():\n    return seed\nseed = 3")
        assert defined == {"f", "seed"}
        assert referenced == set()

    def test_class_attrs_not_module_defs(self):
        defined, referenced = python_scan(
            "class C:\n    attr = 1\n    other = attr\n")
        assert defined == {"C"}
        assert referenced == set()

    def test_method_skips_class_scope(self):
        defined, referenced = python_scan(
            "class C:\n    attr = 1\n    def m(self):\n        return attr\n")
        assert referenced == {"attr"}

    def test_comprehension_targets_are_local(self):
        defined, referenced = python_scan("xs = [i * k for i in rng]")
        assert defined == {"xs"}
        assert referenced == {"k", "rng"}

    def test_for_loop_targets_define(self):
        defined, referenced = python_scan("for row in data:\n    total = row")
        assert defined == {"row", "total"}
        assert referenced == {"data"}

    def test_augassign_references_and_defines(self):
        defined, referenced = python_scan("acc += delta")
        assert defined == {"acc"}
        assert referenced == {"acc", "delta"}

    def test_lambda_defaults_eager_body_deferred(self):
        defined, referenced = python_scan("f = lambda a=base: a + off")
        assert defined == {"f"}
        assert referenced == {"base", "off"}

    def test_annotation_only_not_defined(self):
        defined, referenced = python_scan("x: int")
        assert defined == set()

    def test_syntax_error_raises(self):
        with pytest.raises(CellSyntaxError):
            python_scan("def broken(:")


class TestSqlScan:
    def test_external_table_not_referenced_without_known_bindings(self):
        c = cell(CellKind.SQL, "SELECT a FROM t", binding="df1")
        defined, referenced = extract_cell_variables(c)
        assert defined == {"df1"}
        assert referenced == set()

    def test_known_binding_is_referenced(self):
        c = cell(CellKind.SQL, "SELECT a FROM df0 JOIN dim_t ON df0.k = dim_t.k",
                 binding="df1")
        defined, referenced = extract_cell_variables(c, known_bindings={"df0"})
        assert defined == {"df1"}
        assert referenced == {"df0"}

    def test_default_binding_applied(self):
        c = cell(CellKind.SQL, "SELECT 1", cid="c7")
        defined, _ = extract_cell_variables(c)
        assert defined == {"sql_result_c7"}

    def test_cte_names_excluded(self):
        idents = sql_table_identifiers(
            "WITH tmp AS (SELECT * FROM raw) SELECT * FROM tmp JOIN df2")
        assert "tmp" not in idents
        assert idents == {"raw", "df2"}

    def test_comma_separated_from_items(self):
        idents = sql_table_identifiers("SELECT * FROM a, b WHERE a.x = b.x")
        assert idents == {"a", "b"}

    def test_comments_and_strings_ignored(self):
        idents = sql_table_identifiers(
            "SELECT * FROM real_t -- FROM fake_t\nWHERE name = 'FROM ghost'")
        assert idents == {"real_t"}

    def test_unbalanced_quote_is_syntax_error(self):
        with pytest.raises(CellSyntaxError):
            sql_table_identifiers("SELECT 'oops FROM t")

    def test_empty_statement_is_syntax_error(self):
        with pytest.raises(CellSyntaxError):
            sql_table_identifiers("  -- nothing here\n")


class TestOtherKinds:
    def test_chart_references_binding(self):
        c = cell(CellKind.CHART, binding="df1")
        assert extract_cell_variables(c) == (set(), {"df1"})

    def test_chart_without_binding(self):
        c = cell(CellKind.CHART)
        assert extract_cell_variables(c) == (set(), set())

    def test_markdown_yields_nothing(self):
        c = cell(CellKind.MARKDOWN, "uses df1 textually")
        assert extract_cell_variables(c) == (set(), set())
