"""Proxy-agent planning: model-produced execution plans validated into a
communication FSM.

The model must emit a strict JSON plan (subtasks with capability and agent
assignments, plus information-transition edges); free-form plans are
rejected. Validation checks every assignment against the registry and fails
fast on capabilities nobody provides. Agents start in Wait; transitions form
a DAG whose edges are the only channels selective retrieval honors.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources as importlib_resources
from typing import Any

import jsonschema

from ..errors import InvalidModelOutput, NoCapableAgent
from ..gateway import CompletionRequest, Gateway
from ..jsonutil import extract_json
from .workflow import AgentSpec

PLAN_SCHEMA = json.loads(importlib_resources.files("askbook.agents").joinpath(
    "resources/plan.schema.json").read_text(encoding="utf-8"))
_VALIDATOR = jsonschema.Draft7Validator(PLAN_SCHEMA)

PLAN_SCHEMA_VERSION = PLAN_SCHEMA["$id"]


class AgentState(str, Enum):
    WAIT = "Wait"
    EXECUTION = "Execution"
    FINISH = "Finish"


@dataclass(frozen=True)
class Subtask:
    id: str
    description: str
    capability: str
    agent: str
    depends_on: tuple[str, ...] = ()


@dataclass
class CommPlan:
    subtasks: tuple[Subtask, ...]
    transitions: frozenset[tuple[str, str]]        # (producer agent, consumer agent)
    roles: dict[str, str]                          # agent id -> role string
    states: dict[str, AgentState] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.states:
            self.states = {agent: AgentState.WAIT for agent in self.agents}

    @property
    def agents(self) -> set[str]:
        return {t.agent for t in self.subtasks}

    def ordered_subtasks(self) -> list[Subtask]:
        """Dependency-respecting, deterministic subtask order."""
        by_id = {t.id: t for t in self.subtasks}
        done: list[str] = []
        remaining = [t.id for t in self.subtasks]
        while remaining:
            ready = [tid for tid in remaining
                     if all(dep in done for dep in by_id[tid].depends_on)]
            if not ready:
                raise InvalidModelOutput("subtask dependencies contain a cycle")
            nxt = ready[0]           # declared order breaks ties, deterministically
            done.append(nxt)
            remaining.remove(nxt)
        return [by_id[tid] for tid in done]

    def producers_into(self, consumer: str) -> set[str]:
        return {src for src, dst in self.transitions if dst == consumer}

    def to_json(self) -> dict[str, Any]:
        return {"subtasks": [{"id": t.id, "description": t.description,
                              "capability": t.capability, "agent": t.agent,
                              "depends_on": list(t.depends_on)}
                             for t in self.subtasks],
                "transitions": sorted([list(e) for e in self.transitions]),
                "states": {a: s.value for a, s in sorted(self.states.items())}}


def _check_acyclic(edges: set[tuple[str, str]]) -> None:
    adjacency: dict[str, set[str]] = {}
    for src, dst in edges:
        adjacency.setdefault(src, set()).add(dst)

    visiting: set[str] = set()
    settled: set[str] = set()

    def visit(node: str) -> None:
        if node in settled:
            return
        if node in visiting:
            raise InvalidModelOutput("plan transitions contain a cycle")
        visiting.add(node)
        for nxt in adjacency.get(node, ()):
            visit(nxt)
        visiting.discard(node)
        settled.add(node)

    for node in list(adjacency):
        visit(node)


def validate_plan(raw: Any, registry: dict[str, AgentSpec]) -> CommPlan:
    """Validate a raw plan object against the schema and the registry."""
    issues = [f"{'.'.join(str(p) for p in e.absolute_path) or '$'}: {e.message}"
              for e in _VALIDATOR.iter_errors(raw)]
    if issues:
        raise InvalidModelOutput("plan schema violations: " + "; ".join(issues))

    capabilities_available: dict[str, set[str]] = {}
    for spec in registry.values():
        for cap in spec.capabilities:
            capabilities_available.setdefault(cap, set()).add(spec.id)

    subtasks: list[Subtask] = []
    ids_seen: set[str] = set()
    for entry in raw["subtasks"]:
        capability = entry["capability"]
        agent = entry["agent"]
        capable = capabilities_available.get(capability, set())
        if not capable:
            raise NoCapableAgent(
                f"no registered agent provides capability {capability!r}")
        if agent not in registry:
            raise NoCapableAgent(f"agent {agent!r} is not registered")
        if agent not in capable:
            raise NoCapableAgent(
                f"agent {agent!r} lacks capability {capability!r}")
        if entry["id"] in ids_seen:
            raise InvalidModelOutput(f"duplicate subtask id {entry['id']!r}")
        ids_seen.add(entry["id"])
        subtasks.append(Subtask(id=entry["id"], description=entry["description"],
                                capability=capability, agent=agent,
                                depends_on=tuple(entry.get("depends_on", ()))))
    for task in subtasks:
        for dep in task.depends_on:
            if dep not in ids_seen:
                raise InvalidModelOutput(
                    f"subtask {task.id!r} depends on unknown {dep!r}")

    agents = {t.agent for t in subtasks}
    transitions: set[tuple[str, str]] = set()
    for edge in raw.get("transitions", []):
        src, dst = edge["from"], edge["to"]
        if src not in agents or dst not in agents:
            raise InvalidModelOutput(
                f"transition {src}->{dst} references an unassigned agent")
        if src == dst:
            raise InvalidModelOutput(f"self transition on {src!r}")
        transitions.add((src, dst))
    _check_acyclic(transitions)

    plan = CommPlan(subtasks=tuple(subtasks), transitions=frozenset(transitions),
                    roles={a: registry[a].role for a in agents})
    plan.ordered_subtasks()   # raises on dependency cycles
    return plan


def plan(query: str, scope: Any, registry: dict[str, AgentSpec],
         gateway: Gateway) -> CommPlan:
    """Ask the model for an execution plan and validate it into a CommPlan."""
    if not registry:
        raise ValueError("planning requires at least one registered agent")
    roster = "\n".join(
        f"- {spec.id} (role {spec.role}): capabilities "
        f"{', '.join(spec.capabilities)}" + (f" — {spec.description}" if spec.description else "")
        for spec in sorted(registry.values(), key=lambda s: s.id))
    task_type = getattr(scope, "task_type", None)
    scope_line = (f"Task type: {getattr(task_type, 'value', task_type)}\n"
                  if task_type else "")
    prompt = (
        "Plan the execution of this analytics query as JSON: "
        "{\"version\": 1, \"subtasks\": [{id, description, capability, agent, "
        "depends_on}], \"transitions\": [{from, to}]}. Assign each subtask to "
        "a capable registered agent; transitions say whose outputs each agent "
        "receives.\n"
        f"Registered agents:\n{roster}\n"
        f"{scope_line}"
        f"Query: {query}\n")
    text = gateway.complete(CompletionRequest(prompt=prompt, tag="plan"))
    try:
        raw = extract_json(text)
    except ValueError as exc:
        raise InvalidModelOutput(str(exc)) from exc
    return validate_plan(raw, registry)
