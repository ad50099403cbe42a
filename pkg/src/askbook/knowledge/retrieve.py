"""Query rewrite and coarse-to-fine knowledge retrieval.

Rewrite standardizes relative temporal phrases into ISO date ranges against
an injected ``now`` (a pure pre-pass, so it is testable without a model) and
then lets the model expand coreferential fragments using conversation
history. Retrieval unions loose lexical and embedding hits, backtracks
aliases to their primaries, then ranks candidates by a weighted sum of
token-F1, embedding cosine, and model-judged relevance, each normalized to
[0, 1].
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from datetime import date, datetime, timedelta

from ..errors import InvalidModelOutput
from ..gateway import CompletionRequest, Gateway
from .graph import KnowledgeGraph, KnowledgeNode, NodeType
from .index import TASK_PROFILES, KnowledgeIndexes, cosine, tokenize

logger = logging.getLogger(__name__)

_SCORE_RE = re.compile(r"score\s*[:=]?\s*(-?\d+)", re.I)
_INT_RE = re.compile(r"(-?\d+)")

# Tie-break precedence after score (column strongest), then name.
_TYPE_PRECEDENCE = {NodeType.COLUMN: 0, NodeType.TABLE: 1, NodeType.DATABASE: 2,
                    NodeType.VALUE: 3, NodeType.JARGON: 4, NodeType.ALIAS: 5}


@dataclass(frozen=True)
class RetrievalConfig:
    weights: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)   # lex, sem, llm
    top_k: int = 20
    coarse_threshold: float = 0.15

    def __post_init__(self) -> None:
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if self.top_k <= 0:
            raise ValueError("top_k must be positive")


# --- temporal standardization ---------------------------------------------------

def _as_date(now: date | datetime | str) -> date:
    if isinstance(now, datetime):
        return now.date()
    if isinstance(now, date):
        return now
    return date.fromisoformat(str(now)[:10])


def _month_range(year: int, month: int) -> tuple[date, date]:
    start = date(year, month, 1)
    end = (date(year + 1, 1, 1) if month == 12 else date(year, month + 1, 1))
    return start, end - timedelta(days=1)


def _quarter_range(anchor: date, offset: int) -> tuple[date, date]:
    quarter = (anchor.month - 1) // 3 + offset
    year = anchor.year + quarter // 4
    quarter %= 4
    start = date(year, quarter * 3 + 1, 1)
    end_month = quarter * 3 + 3
    _, end = _month_range(year, end_month)
    return start, end


def resolve_temporal(query: str, now: date | datetime | str) -> str:
    """Replace relative temporal phrases with ISO ``start..end`` ranges."""
    today = _as_date(now)
    monday = today - timedelta(days=today.weekday())

    def year_range(y: int) -> tuple[date, date]:
        return date(y, 1, 1), date(y, 12, 31)

    last_month = (today.year - 1, 12) if today.month == 1 else (today.year, today.month - 1)
    phrases: list[tuple[str, tuple[date, date]]] = [
        ("this year", year_range(today.year)),
        ("last year", year_range(today.year - 1)),
        ("this month", _month_range(today.year, today.month)),
        ("last month", _month_range(*last_month)),
        ("this quarter", _quarter_range(today, 0)),
        ("last quarter", _quarter_range(today, -1)),
        ("this week", (monday, monday + timedelta(days=6))),
        ("last week", (monday - timedelta(days=7), monday - timedelta(days=1))),
        ("today", (today, today)),
        ("yesterday", (today - timedelta(days=1), today - timedelta(days=1))),
    ]
    out = query
    for phrase, (start, end) in phrases:
        out = re.sub(rf"\b{re.escape(phrase)}\b",
                     f"{start.isoformat()}..{end.isoformat()}", out, flags=re.I)
    return out


def rewrite_query(query: str, history: list[str],
                  now: date | datetime | str, gateway: Gateway) -> str:
    """Expand and standardize a query for retrieval.

    Temporal phrases are resolved deterministically before the model sees the
    prompt; the model then fills in coreferential gaps ("what about ...")
    from prior turns.
    """
    resolved = resolve_temporal(query, now)
    turns = "\n".join(f"- {turn}" for turn in history) if history else "(none)"
    prompt = (
        "Rewrite the analytics query below into a clear, fully specified "
        "form. Expand references to earlier turns; keep date ranges exactly "
        "as given. Reply with the rewritten query only.\n"
        f"Prior turns:\n{turns}\n"
        f"Query: {resolved}\n")
    return gateway.complete(CompletionRequest(prompt=prompt, tag="rewrite")).strip()


# --- coarse retrieval -------------------------------------------------------------

def coarse_retrieve(query: str, graph: KnowledgeGraph, cfg: RetrievalConfig,
                    indexes: KnowledgeIndexes, gateway: Gateway,
                    ) -> list[KnowledgeNode]:
    """Union of lexical and embedding hits, aliases backtracked to their
    primaries, deduplicated, in deterministic node-id order."""
    hit_ids = set(indexes.lexical_hits(query))
    query_vec = gateway.embed(query)
    hit_ids |= set(indexes.semantic_hits(query_vec, cfg.coarse_threshold))
    primaries: dict[str, KnowledgeNode] = {}
    for node_id in hit_ids:
        node = graph.get(node_id)
        if node is None:
            continue
        primary = graph.backtrack(node)
        primaries[primary.id] = primary
        if primary.type is NodeType.VALUE and primary.parent:
            # a matched value is only actionable with its column
            column = graph.get(primary.parent)
            if column is not None:
                primaries[column.id] = column
    return [primaries[nid] for nid in sorted(primaries)]


# --- fine-grained ordering ----------------------------------------------------------

@dataclass(frozen=True)
class ScoredNode:
    node: KnowledgeNode
    score: float
    lex: float
    sem: float
    llm: float
    llm_failed: bool = False


def lex_f1(query: str, text: str) -> float:
    """Token-overlap F1 between query and node text, in [0, 1]."""
    q, t = set(tokenize(query)), set(tokenize(text))
    if not q or not t:
        return 0.0
    overlap = len(q & t)
    if overlap == 0:
        return 0.0
    return 2 * overlap / (len(q) + len(t))


def sem_unit(query_vec, node_vec) -> float:
    """Cosine mapped from [-1, 1] to [0, 1]."""
    return max(0.0, min(1.0, (cosine(query_vec, node_vec) + 1.0) / 2.0))


def _llm_eval(query: str, node_text: str, gateway: Gateway) -> int:
    prompt = (
        "Rate 1-5 how relevant this knowledge entry is to the query. "
        "Reply with 'score: N'.\n"
        f"Query: {query}\n"
        f"Entry: {node_text}\n")
    text = gateway.complete(CompletionRequest(prompt=prompt,
                                              tag="retrieval.llm_eval"))
    match = _SCORE_RE.search(text) or _INT_RE.search(text)
    if not match:
        raise InvalidModelOutput(f"no relevance score in reply: {text[:80]!r}")
    return max(1, min(5, int(match.group(1))))


def node_content(node: KnowledgeNode, indexes: KnowledgeIndexes | None) -> str:
    # entry content already leads with the node name
    if indexes is not None:
        entry = indexes.entry_for(node.id)
        if entry is not None:
            return entry.content
    return node.text(TASK_PROFILES["default"])


def fine_order(query: str, nodes: list[KnowledgeNode], cfg: RetrievalConfig,
               gateway: Gateway, indexes: KnowledgeIndexes | None = None,
               ) -> list[ScoredNode]:
    """Weighted three-stage scoring and ranking; returns the top-K.

    score = w_lex * token-F1 + w_sem * cosine + w_llm * model relevance / 5.
    A failed model stage contributes 0 and is flagged on the node. Ties break
    by node-type precedence (column > table > database > value > jargon),
    then name.
    """
    w_lex, w_sem, w_llm = cfg.weights
    query_vec = gateway.embed(query)
    scored: list[ScoredNode] = []
    for node in nodes:
        text = node_content(node, indexes)
        lex = lex_f1(query, text)
        node_vec = indexes.vector_of(node.id) if indexes is not None else None
        if node_vec is None:
            node_vec = gateway.embed(text)
        sem = sem_unit(query_vec, node_vec)
        llm = 0.0
        llm_failed = False
        if w_llm > 0:
            try:
                llm = _llm_eval(query, text, gateway) / 5.0
            except InvalidModelOutput as exc:
                llm_failed = True
                logger.warning("llm_eval failed for %s: %s", node.id, exc)
        scored.append(ScoredNode(node=node,
                                 score=w_lex * lex + w_sem * sem + w_llm * llm,
                                 lex=lex, sem=sem, llm=llm, llm_failed=llm_failed))
    scored.sort(key=lambda s: (-s.score, _TYPE_PRECEDENCE[s.node.type],
                               s.node.name))
    return scored[:cfg.top_k]
