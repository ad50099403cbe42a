"""Exception hierarchy for the askbook engine.

Every error raised by the engine derives from AskbookError so callers can
catch engine failures with a single except clause. The service layer maps
these onto stage-attributed API error payloads.
"""

from __future__ import annotations


class AskbookError(Exception):
    """Base class for every engine error."""


# --- notebook document ------------------------------------------------------

class MalformedDocument(AskbookError):
    """Notebook bytes are not a valid document (bad JSON, missing field,
    duplicate cell id, invariant violation)."""


class UnknownCell(AskbookError):
    """An operation referenced a cell id that is not in the notebook."""


class DuplicateId(AskbookError):
    """A create edit reused an existing cell id."""


# --- cell parsing / DAG -----------------------------------------------------

class CellSyntaxError(AskbookError):
    """A cell's source failed the syntax check; the dependency graph is left
    unchanged."""


class UnknownVariable(AskbookError):
    """A scoped data variable is never defined in the notebook."""


# --- knowledge generation ---------------------------------------------------

class InvalidModelOutput(AskbookError):
    """Model output could not be parsed or failed structural validation."""


class EmptyTable(AskbookError):
    """profile_table was given a table with zero columns."""


# --- knowledge graph / DSL --------------------------------------------------

class OrphanNode(AskbookError):
    """A node was inserted without its required parent (e.g. column without
    table)."""


class DSLValidationError(AskbookError):
    """A DSL specification failed structural validation.

    ``issues`` holds field-level messages, one per offending path.
    """

    def __init__(self, issues: list[str]):
        super().__init__("; ".join(issues))
        self.issues = list(issues)


class UnresolvedColumn(AskbookError):
    """A DSL column reference does not resolve to any known column."""


class UnsupportedOperator(AskbookError):
    """A DSL condition used an operator outside the registry."""


class UnchartableSpec(AskbookError):
    """A DSL spec cannot be charted (no measures)."""


# --- agent kernel -----------------------------------------------------------

class MalformedUnit(AskbookError):
    """An information unit is missing one of its six required fields."""


class NoCapableAgent(AskbookError):
    """Planning required a capability no registered agent provides."""


class BudgetExhausted(AskbookError):
    """An agent exceeded its per-run episode budget.

    Carries the partial trace gathered up to the failure.
    """

    def __init__(self, message: str, trace: list | None = None):
        super().__init__(message)
        self.trace = trace or []


class ToolFailure(AskbookError):
    """A tool invocation failed; the payload is fed back on retry."""


class StepTimeout(AskbookError):
    """A workflow step exceeded its wall-clock timeout."""


# --- gateway ----------------------------------------------------------------

class MissingFixture(AskbookError):
    """The scripted provider has no entry for a prompt fingerprint."""

    def __init__(self, fingerprint: str, prompt_head: str = ""):
        detail = f"no fixture for fingerprint {fingerprint}"
        if prompt_head:
            detail += f" (prompt starts: {prompt_head!r})"
        super().__init__(detail)
        self.fingerprint = fingerprint


class ProviderError(AskbookError):
    """The live provider returned an unrecoverable error."""


class GatewayTimeout(AskbookError):
    """The live provider did not answer within the deadline."""


# --- service ----------------------------------------------------------------

class PendingSuggestion(AskbookError):
    """A new ask arrived while a suggestion is still unresolved."""


class NoPendingSuggestion(AskbookError):
    """resolve was called with nothing pending."""


class ConfigError(AskbookError):
    """Service configuration is invalid; the message names the key."""


class BindError(AskbookError):
    """The HTTP service could not bind its address."""


class StageError(AskbookError):
    """Wraps an upstream failure with the pipeline stage it occurred in."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
