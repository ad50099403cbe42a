"""Tolerant JSON extraction from model output."""

from __future__ import annotations

import json
import re
from typing import Any

_FENCE_RE = re.compile(r"^```[a-zA-Z]*\n|```$", re.M)


def extract_json(text: str) -> Any:
    """Parse the first JSON value in model output.

    Strips markdown fences and leading/trailing prose around the outermost
    ``{...}`` or ``[...]``. Raises ValueError when nothing parses.
    """
    cleaned = _FENCE_RE.sub("", text).strip()
    try:
        return json.loads(cleaned)
    except json.JSONDecodeError:
        pass
    for open_ch, close_ch in (("{", "}"), ("[", "]")):
        start = cleaned.find(open_ch)
        end = cleaned.rfind(close_ch)
        if start != -1 and end > start:
            try:
                return json.loads(cleaned[start:end + 1])
            except json.JSONDecodeError:
                continue
    raise ValueError(f"no JSON value found in model output: {text[:120]!r}")
