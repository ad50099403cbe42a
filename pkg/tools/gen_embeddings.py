#!/usr/bin/env python3
"""Regenerate the committed embedding vocabulary fixture.

Synonym clusters (income/revenue/..., date/ftime/..., product terms, chart
terms) share a base direction with small perturbations, so cosine ordering
reflects the semantics the tests rely on. Deterministic seed.
"""

from __future__ import annotations

import json
import math
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

DIM = 32
SEED = 99

CLUSTERS = {
    "income": ["revenue", "earnings", "shouldincome_after", "sales"],
    "date": ["ftime", "time", "day", "month", "year"],
    "product": ["prod_class4_name", "item", "sku"],
    "chart": ["plot", "graph", "visualization"],
}


def main() -> None:
    rng = random.Random(SEED)

    def rand_unit() -> list[float]:
        v = [rng.uniform(-1, 1) for _ in range(DIM)]
        n = math.sqrt(sum(x * x for x in v))
        return [x / n for x in v]

    def perturb(base: list[float], eps: float = 0.18) -> list[float]:
        v = [b + rng.uniform(-eps, eps) for b in base]
        n = math.sqrt(sum(x * x for x in v))
        return [x / n for x in v]

    vocab: dict[str, list[float]] = {}
    for head, members in CLUSTERS.items():
        base = rand_unit()
        vocab[head] = [round(x, 6) for x in base]
        for member in members:
            vocab[member] = [round(x, 6) for x in perturb(base)]

    out = ROOT / "tests" / "data" / "fixtures" / "embeddings.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(vocab, sort_keys=True, indent=1) + "\n",
                   encoding="utf-8")

    from askbook.gateway.scripted import embed_text

    def cos(a, b):
        return sum(x * y for x, y in zip(a, b))

    income = embed_text("income", vocab)
    assert cos(income, embed_text("revenue", vocab)) > cos(income, embed_text("ftime", vocab))
    print(f"wrote {len(vocab)} vocab vectors to {out}")


if __name__ == "__main__":
    main()
