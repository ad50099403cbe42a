#!/usr/bin/env python3
"""Regenerate the committed synthetic notebook corpus and its seeded queries.

Usage: python tools/gen_corpus.py

Writes 30 notebooks (2-50 cells) to tests/data/corpus/ plus queries.json with
one seeded query per notebook. Deterministic: fixed seed, canonical
serialization.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "tests"))

from askbook.notebook import serialize_notebook  # noqa: E402
from helpers.synth import synth_notebook  # noqa: E402

SEED = 20240817
N_NOTEBOOKS = 30


def main() -> None:
    out_dir = ROOT / "tests" / "data" / "corpus"
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    queries: dict[str, dict] = {}
    for i in range(N_NOTEBOOKS):
        n_cells = rng.randint(10, 50)
        nb, truths = synth_notebook(rng, n_cells, nb_id=f"corpus_{i:02d}")
        path = out_dir / f"{nb.id}.dlnb.json"
        path.write_bytes(serialize_notebook(nb))

        # seeded query: anchor on a cell that has ancestors if possible
        anchored = [t for t in truths.values() if t.referenced]
        anchor = rng.choice(anchored).cell.id if anchored else nb.cells[-1].id
        task = rng.choice(["NL2SQL", "NL2DSCode", "NL2VIS", "NL2Insight"])
        queries[nb.id] = {
            "query": rng.choice([
                "plot monthly revenue trend",
                "summarize income by product",
                "clean up the joins in the report",
                "forecast next quarter sales",
            ]),
            "anchor": anchor,
            "task": task,
        }
    (out_dir / "queries.json").write_text(
        json.dumps(queries, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {N_NOTEBOOKS} notebooks + queries.json to {out_dir}")


if __name__ == "__main__":
    main()
