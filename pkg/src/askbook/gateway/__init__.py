from .core import CompletionRequest, CompletionResponse, Gateway, TagLedger
from .scripted import (
    EMBED_DIM,
    ReplayFixture,
    ScriptedProvider,
    SequenceProvider,
    fingerprint,
    normalize_prompt,
)

__all__ = [
    "CompletionRequest",
    "CompletionResponse",
    "Gateway",
    "TagLedger",
    "ReplayFixture",
    "ScriptedProvider",
    "SequenceProvider",
    "EMBED_DIM",
    "fingerprint",
    "normalize_prompt",
]
