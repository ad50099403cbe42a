from .units import (
    InformationUnit,
    Payload,
    PayloadKind,
    SharedBuffer,
    SweepPolicy,
)
from .workflow import AgentSpec, LogicalClock, Step, run_agent_workflow
from .plan import AgentState, CommPlan, Subtask, plan, validate_plan
from .dispatch import DispatchResult, TraceEvent, dispatch, selective_retrieve
from .tools import Tool, ToolRunner, default_tools
from .builtin import builtin_registry

__all__ = [
    "InformationUnit",
    "Payload",
    "PayloadKind",
    "SharedBuffer",
    "SweepPolicy",
    "AgentSpec",
    "LogicalClock",
    "Step",
    "run_agent_workflow",
    "AgentState",
    "CommPlan",
    "Subtask",
    "plan",
    "validate_plan",
    "DispatchResult",
    "TraceEvent",
    "dispatch",
    "selective_retrieve",
    "Tool",
    "ToolRunner",
    "default_tools",
    "builtin_registry",
]
