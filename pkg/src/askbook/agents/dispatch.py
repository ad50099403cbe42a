"""Proxy-agent dispatch: drives the plan's FSM over the shared buffer.

For each subtask in dependency order the proxy selects the consumer's
relevant units from the buffer (only along the plan's transition edges),
moves the agent Wait -> Execution, runs its workflow, deposits the produced
unit, and returns the agent to Wait. Failed episodes deposit an error unit
under the same key (superseding the previous attempt) and retry within the
per-agent episode budget. When every subtask is done all agents move to
Finish and one final model call synthesizes the answer over the live units.

Every state change lands in the trace as {event, agent, state, unit_key,
timestamp} with logical timestamps, so replayed runs are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ..errors import (
    BudgetExhausted,
    InvalidModelOutput,
    StepTimeout,
    ToolFailure,
)
from ..gateway import CompletionRequest, Gateway
from .plan import AgentState, CommPlan
from .tools import ToolRunner
from .units import InformationUnit, Payload, PayloadKind, SharedBuffer
from .workflow import AgentSpec, LogicalClock, run_agent_workflow

DEFAULT_EPISODE_BUDGET = 5


@dataclass(frozen=True)
class TraceEvent:
    event: str                    # retrieve | state | unit_stored | episode_error | answer
    agent: str
    state: str
    unit_key: str | None
    timestamp: int

    def to_json(self) -> dict[str, Any]:
        return {"event": self.event, "agent": self.agent, "state": self.state,
                "unit_key": self.unit_key, "timestamp": self.timestamp}


@dataclass
class DispatchResult:
    answer: str
    trace: tuple[TraceEvent, ...]
    units: tuple[InformationUnit, ...]
    states: dict[str, AgentState]
    episodes: dict[str, int]

    def trace_json(self) -> list[dict[str, Any]]:
        return [event.to_json() for event in self.trace]


def selective_retrieve(plan: CommPlan, buffer: SharedBuffer,
                       consumer: str) -> list[InformationUnit]:
    """Live units whose producing role has a transition edge into
    ``consumer``, newest per key, timestamp-ordered."""
    if consumer not in plan.agents:
        raise ValueError(f"agent {consumer!r} is not part of the plan")
    producer_roles = {plan.roles[p] for p in plan.producers_into(consumer)}
    return [u for u in buffer.live_units() if u.role in producer_roles]


def _key_str(unit: InformationUnit) -> str:
    return "/".join(unit.key)


def dispatch(
    plan: CommPlan,
    buffer: SharedBuffer,
    registry: dict[str, AgentSpec],
    gateway: Gateway,
    tools: ToolRunner,
    envelope: dict[str, Any] | None = None,
    budget: int = DEFAULT_EPISODE_BUDGET,
    clock: LogicalClock | None = None,
) -> DispatchResult:
    """Run the plan to completion and synthesize the final answer.

    Raises BudgetExhausted (carrying the partial trace) when an agent burns
    through its episode budget without a successful unit.
    """
    clock = clock or LogicalClock()
    envelope = dict(envelope or {})
    trace: list[TraceEvent] = []
    episodes: dict[str, int] = {agent: 0 for agent in plan.agents}

    def emit(event: str, agent: str, unit_key: str | None = None) -> None:
        trace.append(TraceEvent(event=event, agent=agent,
                                state=plan.states[agent].value,
                                unit_key=unit_key, timestamp=clock.tick()))

    for subtask in plan.ordered_subtasks():
        agent = subtask.agent
        spec = registry[agent]
        task_envelope = {**envelope, "subtask": subtask.description,
                         "capability": subtask.capability}
        last_error: str | None = None
        while True:
            if episodes[agent] >= budget:
                raise BudgetExhausted(
                    f"agent {agent!r} exhausted {budget} episodes on "
                    f"subtask {subtask.id!r}",
                    trace=[e.to_json() for e in trace])
            episodes[agent] += 1
            delivered = selective_retrieve(plan, buffer, agent)
            emit("retrieve", agent,
                 unit_key=",".join(_key_str(u) for u in delivered) or None)
            plan.states[agent] = AgentState.EXECUTION
            emit("state", agent)
            if last_error is not None:
                task_envelope["last_error"] = last_error
            try:
                unit = run_agent_workflow(spec, task_envelope, delivered,
                                          gateway, tools, clock)
            except (ToolFailure, StepTimeout, InvalidModelOutput) as exc:
                last_error = str(exc)
                error_unit = InformationUnit(
                    data_source=str(task_envelope.get("data_source", "unknown")),
                    role=spec.role, action=spec.workflow[-1].id,
                    description=f"{spec.role} attempt failed: {last_error[:200]}",
                    content=Payload(PayloadKind.TEXT, f"error: {last_error}"),
                    timestamp=clock.tick())
                buffer.put(error_unit)
                emit("episode_error", agent, unit_key=_key_str(error_unit))
                plan.states[agent] = AgentState.WAIT
                emit("state", agent)
                continue
            buffer.put(unit)
            emit("unit_stored", agent, unit_key=_key_str(unit))
            plan.states[agent] = AgentState.WAIT
            emit("state", agent)
            break

    for agent in sorted(plan.agents):
        plan.states[agent] = AgentState.FINISH
        emit("state", agent)

    live = buffer.live_units()
    summary = "\n".join(
        f"- [{u.role} / {u.action} @ {u.data_source}] {u.description}: "
        f"{u.content.text()[:400]}" for u in live) or "(no units)"
    answer = gateway.complete(CompletionRequest(
        prompt=("Synthesize a final answer for the user from the information "
                "units below. Reference produced artifacts by action name.\n"
                f"{summary}\n"),
        tag="finalize"))
    trace.append(TraceEvent(event="answer", agent="proxy", state="Finish",
                            unit_key=None, timestamp=clock.tick()))
    return DispatchResult(answer=answer, trace=tuple(trace),
                          units=tuple(live), states=dict(plan.states),
                          episodes=episodes)
