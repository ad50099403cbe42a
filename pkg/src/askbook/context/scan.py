"""Per-cell variable extraction: which names a cell defines and references.

Python cells get real scope analysis. Names a cell *defines* are its
module-scope bindings (assignments, ``def``/``class`` names, imports, loop and
``with`` targets). Names it *references* are free names: loads that evaluate
at module scope before the name is bound in the same cell, plus free names
inside function bodies that no enclosing scope in the cell binds. Builtins are
not special-cased; unresolvable names simply never produce graph edges.

The analysis pairs an ordered AST walk (module-level execution order, so
``y = x`` before ``x = 1`` still counts ``x`` as referenced) with the stdlib
``symtable`` (exact closure/class scoping for deferred loads). Out of scope,
by design: names bound only through ``global`` declarations inside function
bodies, ``exec``, and attribute mutation.

SQL cells define their result binding and reference FROM/JOIN identifiers
that match known notebook bindings; CTE names are excluded. Chart cells
reference their bound data variable. Markdown cells define and reference
nothing.
"""

from __future__ import annotations

import ast
import re
import symtable
from dataclasses import dataclass

from ..errors import CellSyntaxError
from ..notebook import Cell, CellKind

# --- python ------------------------------------------------------------------


class _Frame:
    __slots__ = ("kind", "binds")

    def __init__(self, kind: str):
        self.kind = kind            # "module" | "class" | "comp"
        self.binds: set[str] = set()


class _ImmediateWalker:
    """Ordered walk over module-level code: tracks binds per frame and
    records loads of names not yet bound anywhere on the frame stack.

    Function and lambda bodies are skipped (they evaluate later); class
    bodies and comprehensions evaluate eagerly and are descended into.
    """

    def __init__(self) -> None:
        self.frames: list[_Frame] = [_Frame("module")]
        self.unbound: set[str] = set()

    # frame helpers

    def _is_bound(self, name: str) -> bool:
        return any(name in f.binds for f in self.frames)

    def _load(self, name: str) -> None:
        if not self._is_bound(name):
            self.unbound.add(name)

    def _bind(self, name: str) -> None:
        self.frames[-1].binds.add(name)

    def _bind_walrus(self, name: str) -> None:
        # PEP 572: assignment expressions bind in the nearest enclosing
        # non-comprehension frame.
        for frame in reversed(self.frames):
            if frame.kind != "comp":
                frame.binds.add(name)
                return
        self.frames[0].binds.add(name)

    def _bind_target(self, target: ast.expr) -> None:
        if isinstance(target, ast.Name):
            self._bind(target.id)
        elif isinstance(target, (ast.Tuple, ast.List)):
            for elt in target.elts:
                self._bind_target(elt)
        elif isinstance(target, ast.Starred):
            self._bind_target(target.value)
        elif isinstance(target, (ast.Attribute, ast.Subscript)):
            self.expr(target)   # mutation, not a module bind; base is a load

    # statements

    def body(self, stmts: list[ast.stmt]) -> None:
        for stmt in stmts:
            self.stmt(stmt)

    def stmt(self, node: ast.stmt) -> None:
        if isinstance(node, ast.Assign):
            self.expr(node.value)
            for target in node.targets:
                self._bind_target(target)
        elif isinstance(node, ast.AugAssign):
            if isinstance(node.target, ast.Name):
                self._load(node.target.id)
            else:
                self.expr(node.target)
            self.expr(node.value)
            if isinstance(node.target, ast.Name):
                self._bind(node.target.id)
        elif isinstance(node, ast.AnnAssign):
            self.expr(node.annotation)
            if node.value is not None:
                self.expr(node.value)
                self._bind_target(node.target)
            elif not isinstance(node.target, ast.Name):
                self.expr(node.target)
            # annotation without value binds nothing at runtime
        elif isinstance(node, ast.Expr):
            self.expr(node.value)
        elif isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            for dec in node.decorator_list:
                self.expr(dec)
            self._arg_exprs(node.args)
            if node.returns is not None:
                self.expr(node.returns)
            self._bind(node.name)       # body is deferred; symtable covers it
        elif isinstance(node, ast.ClassDef):
            for dec in node.decorator_list:
                self.expr(dec)
            for base in node.bases:
                self.expr(base)
            for kw in node.keywords:
                self.expr(kw.value)
            self.frames.append(_Frame("class"))
            self.body(node.body)
            self.frames.pop()
            self._bind(node.name)
        elif isinstance(node, (ast.For, ast.AsyncFor)):
            self.expr(node.iter)
            self._bind_target(node.target)
            self.body(node.body)
            self.body(node.orelse)
        elif isinstance(node, ast.While):
            self.expr(node.test)
            self.body(node.body)
            self.body(node.orelse)
        elif isinstance(node, ast.If):
            self.expr(node.test)
            self.body(node.body)
            self.body(node.orelse)
        elif isinstance(node, (ast.With, ast.AsyncWith)):
            for item in node.items:
                self.expr(item.context_expr)
                if item.optional_vars is not None:
                    self._bind_target(item.optional_vars)
            self.body(node.body)
        elif isinstance(node, ast.Try) or node.__class__.__name__ == "TryStar":
            self.body(node.body)
            for handler in node.handlers:
                if handler.type is not None:
                    self.expr(handler.type)
                if handler.name:
                    self._bind(handler.name)
                self.body(handler.body)
            self.body(node.orelse)
            self.body(node.finalbody)
        elif isinstance(node, (ast.Import, ast.ImportFrom)):
            for alias in node.names:
                if alias.name == "*":
                    continue
                name = alias.asname or alias.name.split(".")[0]
                self._bind(name)
        elif isinstance(node, ast.Delete):
            for target in node.targets:
                if isinstance(target, ast.Name):
                    self._load(target.id)
                else:
                    self.expr(target)
        elif isinstance(node, (ast.Global, ast.Nonlocal, ast.Pass,
                               ast.Break, ast.Continue)):
            pass
        elif isinstance(node, ast.Match):
            self.expr(node.subject)
            for case in node.cases:
                self._pattern(case.pattern)
                if case.guard is not None:
                    self.expr(case.guard)
                self.body(case.body)
        else:
            # Assert, Raise, Return, and anything new: walk child expressions.
            for child in ast.iter_child_nodes(node):
                if isinstance(child, ast.expr):
                    self.expr(child)
                elif isinstance(child, ast.stmt):
                    self.stmt(child)

    def _pattern(self, pat: ast.AST) -> None:
        if isinstance(pat, ast.MatchValue):
            self.expr(pat.value)
        elif isinstance(pat, ast.MatchAs):
            if pat.pattern is not None:
                self._pattern(pat.pattern)
            if pat.name:
                self._bind(pat.name)
        elif isinstance(pat, ast.MatchStar):
            if pat.name:
                self._bind(pat.name)
        elif isinstance(pat, ast.MatchOr):
            for sub in pat.patterns:
                self._pattern(sub)
        elif isinstance(pat, ast.MatchSequence):
            for sub in pat.patterns:
                self._pattern(sub)
        elif isinstance(pat, ast.MatchMapping):
            for key in pat.keys:
                self.expr(key)
            for sub in pat.patterns:
                self._pattern(sub)
            if pat.rest:
                self._bind(pat.rest)
        elif isinstance(pat, ast.MatchClass):
            self.expr(pat.cls)
            for sub in pat.patterns:
                self._pattern(sub)
            for sub in pat.kwd_patterns:
                self._pattern(sub)

    # expressions

    def expr(self, node: ast.expr | None) -> None:
        if node is None:
            return
        if isinstance(node, ast.Name):
            if isinstance(node.ctx, ast.Load):
                self._load(node.id)
        elif isinstance(node, ast.Lambda):
            self._arg_exprs(node.args)          # defaults evaluate eagerly
        elif isinstance(node, (ast.ListComp, ast.SetComp, ast.GeneratorExp)):
            self._comp(node, [node.elt])
        elif isinstance(node, ast.DictComp):
            self._comp(node, [node.key, node.value])
        elif isinstance(node, ast.NamedExpr):
            self.expr(node.value)
            if isinstance(node.target, ast.Name):
                self._bind_walrus(node.target.id)
        else:
            for child in ast.iter_child_nodes(node):
                if isinstance(child, ast.expr):
                    self.expr(child)
                elif isinstance(child, ast.keyword):
                    self.expr(child.value)
                elif isinstance(child, ast.comprehension):  # unreachable; safety
                    self.expr(child.iter)

    def _arg_exprs(self, args: ast.arguments) -> None:
        for default in list(args.defaults) + [d for d in args.kw_defaults if d]:
            self.expr(default)
        every = (list(args.posonlyargs) + list(args.args) + list(args.kwonlyargs)
                 + [a for a in (args.vararg, args.kwarg) if a])
        for arg in every:
            if arg.annotation is not None:
                self.expr(arg.annotation)

    def _comp(self, node: ast.expr, results: list[ast.expr]) -> None:
        gens = node.generators
        self.expr(gens[0].iter)                 # outermost iterable: eager, outside
        self.frames.append(_Frame("comp"))
        for i, gen in enumerate(gens):
            self._bind_target(gen.target)
            if i > 0:
                self.expr(gen.iter)
            for cond in gen.ifs:
                self.expr(cond)
        for result in results:
            self.expr(result)
        self.frames.pop()


def _deferred_loads(table: symtable.SymbolTable) -> set[str]:
    """Names referenced in nested scopes that resolve to module globals."""
    out: set[str] = set()
    for child in table.get_children():
        for sym in child.get_symbols():
            if sym.is_referenced() and sym.is_global():
                out.add(sym.get_name())
        out |= _deferred_loads(child)
    return out


def python_scan(source: str) -> tuple[set[str], set[str]]:
    """(defined, referenced) for a Python cell. Raises CellSyntaxError."""
    try:
        tree = ast.parse(source)
        table = symtable.symtable(source, "<cell>", "exec")
    except SyntaxError as exc:
        raise CellSyntaxError(f"python: {exc.msg} (line {exc.lineno})") from exc
    walker = _ImmediateWalker()
    walker.body(tree.body)
    defined = set(walker.frames[0].binds)
    referenced = set(walker.unbound) | (_deferred_loads(table) - defined)
    return defined, referenced


# --- sql ----------------------------------------------------------------------

_SQL_COMMENT_RE = re.compile(r"--[^\n]*|/\*.*?\*/", re.S)
_SQL_STRING_RE = re.compile(r"'(?:[^']|'')*'|\"(?:[^\"]|\"\")*\"")
_SQL_IDENT = r"[A-Za-z_][A-Za-z0-9_.]*"
_FROM_JOIN_RE = re.compile(
    rf"\b(?:from|join)\s+(`?{_SQL_IDENT}`?(?:\s*,\s*`?{_SQL_IDENT}`?)*)",
    re.I)
_CTE_RE = re.compile(rf"\b(?:with|,)\s*({_SQL_IDENT})\s+as\s*\(", re.I)


def _sql_syntax_check(source: str) -> str:
    """Light well-formedness gate: nonempty, balanced quotes and parens.
    Returns the comment-stripped source."""
    stripped = _SQL_COMMENT_RE.sub(" ", source)
    if not stripped.strip():
        raise CellSyntaxError("sql: empty statement")
    for quote in ("'", '"'):
        if stripped.count(quote) % 2 != 0:
            raise CellSyntaxError(f"sql: unbalanced {quote} quote")
    no_strings = _SQL_STRING_RE.sub(" ", stripped)
    depth = 0
    for ch in no_strings:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth < 0:
                raise CellSyntaxError("sql: unbalanced parentheses")
    if depth != 0:
        raise CellSyntaxError("sql: unbalanced parentheses")
    return no_strings


def sql_table_identifiers(source: str) -> set[str]:
    """Identifiers appearing after FROM/JOIN, minus CTE names."""
    text = _sql_syntax_check(source)
    ctes = {m.group(1) for m in _CTE_RE.finditer(text)}
    idents: set[str] = set()
    for match in _FROM_JOIN_RE.finditer(text):
        for item in match.group(1).split(","):
            name = item.strip().strip("`")
            if name:
                idents.add(name)
    return idents - ctes


# --- cell-level API -----------------------------------------------------------


@dataclass(frozen=True)
class CellScan:
    """Cached extraction result for one cell.

    ``referenced`` holds raw candidates (for SQL cells: every FROM/JOIN
    identifier); edge resolution filters them against actual definitions, so
    a cached scan stays valid when other cells change.
    """

    cell_id: str
    kind: CellKind
    defined: frozenset[str]
    referenced: frozenset[str]


def scan_cell(cell: Cell) -> CellScan:
    """Extract raw defined/referenced candidates. Raises CellSyntaxError."""
    if cell.kind is CellKind.MARKDOWN:
        defined, referenced = set(), set()
    elif cell.kind is CellKind.PYTHON:
        defined, referenced = python_scan(cell.source)
    elif cell.kind is CellKind.SQL:
        referenced = sql_table_identifiers(cell.source)
        binding = cell.effective_binding()
        defined = {binding} if binding else set()
    else:  # chart
        defined = set()
        referenced = {cell.binding} if cell.binding else set()
    return CellScan(cell_id=cell.id, kind=cell.kind,
                    defined=frozenset(defined), referenced=frozenset(referenced))


def extract_cell_variables(
    cell: Cell, known_bindings: frozenset[str] | set[str] = frozenset(),
) -> tuple[set[str], set[str]]:
    """(defined, referenced) for one cell.

    SQL references are FROM/JOIN identifiers restricted to ``known_bindings``
    (plain table names are external data, not notebook variables). The DAG
    builder passes the notebook-wide definition set here.
    """
    scan = scan_cell(cell)
    if cell.kind is CellKind.SQL:
        return set(scan.defined), set(scan.referenced) & set(known_bindings)
    return set(scan.defined), set(scan.referenced)
