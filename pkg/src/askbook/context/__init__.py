from .scan import CellScan, extract_cell_variables, scan_cell
from .dag import CellDAG, ancestors, build_dag, descendants, topo_order, update_dag
from .retrieve import (
    ContextBundle,
    QueryScope,
    TaskType,
    markdown_similarity,
    prune_by_task,
    retrieve_context,
)

__all__ = [
    "CellScan",
    "extract_cell_variables",
    "scan_cell",
    "CellDAG",
    "build_dag",
    "update_dag",
    "ancestors",
    "descendants",
    "topo_order",
    "ContextBundle",
    "QueryScope",
    "TaskType",
    "markdown_similarity",
    "prune_by_task",
    "retrieve_context",
]
