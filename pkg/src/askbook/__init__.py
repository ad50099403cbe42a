"""askbook: a notebook-centric BI agent engine.

Natural-language queries become SQL, Python, and chart cells inside a
multi-language notebook. A dependency DAG over cells picks the minimum
context for each query, a knowledge graph grounds ambiguous business terms,
and a proxy-dispatched agent team produces the result through a replayable
model gateway.
"""

__version__ = "0.1.0"
