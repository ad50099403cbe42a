from .config import Config
from .store import GraphStore, NotebookStore
from .session import Session, SessionManager, Suggestion
from .scenario import run_scenario

__all__ = [
    "Config",
    "GraphStore",
    "NotebookStore",
    "Session",
    "SessionManager",
    "Suggestion",
    "run_scenario",
]
