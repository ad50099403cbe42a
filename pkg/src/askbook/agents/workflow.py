"""Agent workflows: a DAG of model calls and tool calls per agent.

Steps are declared in topological order; each step's inputs name earlier
steps (whose payloads flow in) or envelope keys. The terminal step's payload
becomes the agent's information unit, with the action named after that step.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Any

from ..errors import InvalidModelOutput
from ..gateway import CompletionRequest, Gateway
from ..jsonutil import extract_json
from .tools import ToolRunner
from .units import InformationUnit, Payload, PayloadKind


class LogicalClock:
    """Monotone run-scoped counter standing in for wall-clock timestamps, so
    replays are byte-identical."""

    def __init__(self, start: int = 0):
        self._value = start
        self._lock = threading.Lock()

    def tick(self) -> int:
        with self._lock:
            self._value += 1
            return self._value


@dataclass(frozen=True)
class Step:
    id: str
    kind: str                                  # "llm" | "tool"
    inputs: tuple[str, ...] = ()
    prompt: str = ""                           # llm steps: template
    output: PayloadKind = PayloadKind.TEXT     # llm steps: payload kind
    tool: str = ""                             # tool steps: registered name


@dataclass(frozen=True)
class AgentSpec:
    id: str
    role: str
    capabilities: tuple[str, ...]
    workflow: tuple[Step, ...]
    description: str = ""

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for step in self.workflow:
            for ref in step.inputs:
                if ref.startswith("step:") and ref[5:] not in seen:
                    raise ValueError(
                        f"{self.id}: step {step.id!r} input {ref!r} does not "
                        f"name an earlier step")
            if step.kind not in ("llm", "tool"):
                raise ValueError(f"{self.id}: unknown step kind {step.kind!r}")
            seen.add(step.id)


class _Missing(dict):
    def __missing__(self, key: str) -> str:
        return ""


def _render_units(units: list[InformationUnit]) -> str:
    if not units:
        return "(none)"
    lines = []
    for unit in units:
        lines.append(f"- [{unit.role} / {unit.action} @ {unit.data_source}] "
                     f"{unit.description}: {unit.content.text()[:500]}")
    return "\n".join(lines)


def _parse_llm_payload(step: Step, text: str) -> Payload:
    stripped = text.strip()
    if step.output is PayloadKind.CHART_SPEC:
        try:
            return Payload(PayloadKind.CHART_SPEC, extract_json(stripped))
        except ValueError as exc:
            raise InvalidModelOutput(f"step {step.id}: {exc}") from exc
    if step.output in (PayloadKind.SQL, PayloadKind.CODE):
        # tolerate fenced blocks
        if stripped.startswith("```"):
            lines = [ln for ln in stripped.splitlines() if not ln.startswith("```")]
            stripped = "\n".join(lines).strip()
        if not stripped:
            raise InvalidModelOutput(f"step {step.id}: empty {step.output.value}")
        return Payload(step.output, stripped)
    return Payload(PayloadKind.TEXT, stripped)


def run_agent_workflow(
    spec: AgentSpec,
    envelope: dict[str, Any],
    units: list[InformationUnit],
    gateway: Gateway,
    tools: ToolRunner,
    clock: LogicalClock | None = None,
) -> InformationUnit:
    """Execute the workflow and wrap the terminal payload as a unit.

    ``envelope`` carries the task (query, data_source, table rows, knowledge
    and context text); delivered units are exposed to prompts as {units}.
    Raises StepTimeout / ToolFailure from tool steps and InvalidModelOutput
    from unparseable model steps.
    """
    if not spec.workflow:
        raise ValueError(f"agent {spec.id} has an empty workflow")
    clock = clock or LogicalClock()
    values: dict[str, Payload] = {}
    fmt = _Missing({key: str(value) for key, value in envelope.items()
                    if isinstance(value, (str, int, float))})
    fmt["units"] = _render_units(units)

    for step in spec.workflow:
        input_payloads: list[Payload] = []
        for ref in step.inputs:
            if ref.startswith("step:"):
                input_payloads.append(values[ref[5:]])
            elif ref == "units:sql":
                sql_units = [u for u in units if u.content.kind is PayloadKind.SQL]
                if not sql_units:
                    raise InvalidModelOutput(
                        f"step {step.id}: no sql unit was delivered")
                input_payloads.append(sql_units[-1].content)
            elif ref in envelope and isinstance(envelope[ref], Payload):
                input_payloads.append(envelope[ref])
        if step.kind == "llm":
            prompt = step.prompt.format_map(
                _Missing({**fmt, **{sid: p.text() for sid, p in values.items()}}))
            text = gateway.complete(CompletionRequest(
                prompt=prompt, tag=f"agent.{spec.id}.{step.id}"))
            values[step.id] = _parse_llm_payload(step, text)
        else:
            values[step.id] = tools.run(step.tool, input_payloads, envelope)

    terminal = spec.workflow[-1]
    return InformationUnit(
        data_source=str(envelope.get("data_source", "unknown")),
        role=spec.role,
        action=terminal.id,
        description=f"{spec.role} finished {terminal.id} for "
                    f"{envelope.get('data_source', 'task')}",
        content=values[terminal.id],
        timestamp=clock.tick())
