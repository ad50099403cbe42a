"""Brute-force oracles, kept independent of the engine's implementations."""

from __future__ import annotations

import re
from math import sqrt


def oracle_edges(order: list[str],
                 truth: dict[str, tuple[set[str], set[str]]],
                 ) -> set[tuple[str, str]]:
    """Dependency edges by exhaustive (definer, user) enumeration.

    ``truth`` maps cell id -> (defined, referenced). For every referenced name
    every earlier cell is scanned; the latest earlier definer wins.
    """
    edges: set[tuple[str, str]] = set()
    for user_idx, user in enumerate(order):
        _, referenced = truth[user]
        for var in referenced:
            definer = None
            for cand_idx in range(user_idx):
                cand = order[cand_idx]
                defined, _ = truth[cand]
                if var in defined:
                    definer = cand
            if definer is not None:
                edges.add((definer, user))
    return edges


def oracle_ancestors(edges: set[tuple[str, str]], start: str) -> set[str]:
    """Reverse reachability by fixpoint iteration."""
    result: set[str] = set()
    changed = True
    while changed:
        changed = False
        for src, dst in edges:
            if (dst == start or dst in result) and src not in result:
                result.add(src)
                changed = True
    return result


def oracle_descendants(edges: set[tuple[str, str]], start: str) -> set[str]:
    result: set[str] = set()
    changed = True
    while changed:
        changed = False
        for src, dst in edges:
            if (src == start or src in result) and dst not in result:
                result.add(dst)
                changed = True
    return result


def oracle_similarity(text: str, query: str) -> float:
    """Word-set cosine, written independently of the engine's version."""
    token = re.compile(r"[a-z0-9_]+")
    a = set(token.findall(text.lower()))
    b = set(token.findall(query.lower()))
    if not a or not b:
        return 0.0
    inter = sum(1 for w in a if w in b)
    return inter / sqrt(len(a) * len(b))


def parse_sql_clauses(sql: str) -> dict:
    """Re-parse rendered SQL into clause sets for round-trip checks.

    Understands exactly the rendering grammar: SELECT items FROM table
    [WHERE conjuncts] [GROUP BY cols] [ORDER BY col dir, ...] [LIMIT n].
    """
    pattern = re.compile(
        r"^SELECT (?P<select>.+?) FROM (?P<table>\S+)"
        r"(?: WHERE (?P<where>.+?))?"
        r"(?: GROUP BY (?P<group>.+?))?"
        r"(?: ORDER BY (?P<order>.+?))?"
        r"(?: LIMIT (?P<limit>\d+))?$",
        re.S)
    match = pattern.match(sql.strip())
    if not match:
        raise AssertionError(f"unparseable SQL: {sql!r}")
    parts = match.groupdict()
    where = parts["where"]
    conjuncts: list[str] = []
    if where:
        pieces = where.split(" AND ")
        i = 0
        while i < len(pieces):
            piece = pieces[i]
            if " BETWEEN " in piece and i + 1 < len(pieces):
                piece = piece + " AND " + pieces[i + 1]   # rejoin BETWEEN halves
                i += 1
            conjuncts.append(piece.strip())
            i += 1
    return {
        "select": [s.strip() for s in parts["select"].split(",")],
        "table": parts["table"],
        "where": sorted(conjuncts),
        "group_by": [g.strip() for g in parts["group"].split(",")] if parts["group"] else [],
        "order_by": [o.strip() for o in parts["order"].split(",")] if parts["order"] else [],
        "limit": int(parts["limit"]) if parts["limit"] else None,
    }
