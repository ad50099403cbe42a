"""Deterministic scripted provider: replay fixtures and response queues.

Two scripted modes back the test and replay machinery:

* ``ScriptedProvider`` resolves prompts against a committed fixture map keyed
  by prompt fingerprint; a miss raises MissingFixture naming the fingerprint.
* ``SequenceProvider`` pops pre-scripted responses from per-tag queues, which
  is how unit tests force exact score/response sequences.

Fingerprints normalize whitespace and strip ISO dates/timestamps so prompts
that embed a resolved "now" still match their fixture. Embeddings compose a
committed token vocabulary with a hash-derived fallback, so lookups stay
total and byte-deterministic for any text.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import struct
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import MissingFixture
from .core import CompletionRequest, CompletionResponse

EMBED_DIM = 32

_WS_RE = re.compile(r"\s+")
_ISO_RE = re.compile(
    r"\d{4}-\d{2}-\d{2}([T ]\d{2}:\d{2}(:\d{2})?(\.\d+)?(Z|[+-]\d{2}:\d{2})?)?")
_TOKEN_RE = re.compile(r"[a-z0-9_]+")


def normalize_prompt(prompt: str) -> str:
    """Whitespace-collapsed, date-stripped form used for fingerprinting."""
    return _WS_RE.sub(" ", _ISO_RE.sub("<date>", prompt)).strip()


def fingerprint(prompt: str) -> str:
    return hashlib.sha256(normalize_prompt(prompt).encode("utf-8")).hexdigest()[:16]


def _hash_vector(token: str) -> list[float]:
    # 8 bytes of sha256 per component; stable across runs and platforms.
    vec = []
    for i in range(EMBED_DIM):
        digest = hashlib.sha256(f"{token}\x00{i}".encode("utf-8")).digest()
        (raw,) = struct.unpack(">q", digest[:8])
        vec.append(raw / float(2 ** 63))
    return _unit(vec)


def _unit(vec: list[float]) -> list[float]:
    norm = math.sqrt(sum(v * v for v in vec))
    if norm == 0.0:
        return [0.0] * len(vec)
    return [v / norm for v in vec]


def embed_text(text: str, vocab: dict[str, list[float]]) -> list[float]:
    """Deterministic embedding: exact vocab hit, else unit-normalized mean of
    per-token vectors (vocab entry or hash fallback).

    The empty string maps to the all-zero vector, the documented
    zero-information constant.
    """
    if text in vocab:
        return _unit(list(vocab[text]))
    tokens = _TOKEN_RE.findall(text.lower())
    if not tokens:
        return [0.0] * EMBED_DIM
    acc = [0.0] * EMBED_DIM
    for token in tokens:
        tv = vocab.get(token) or _hash_vector(token)
        for i, v in enumerate(tv):
            acc[i] += v
    return _unit([v / len(tokens) for v in acc])


@dataclass
class ReplayFixture:
    """Committed scripted responses: fingerprint -> response + token counts,
    plus the embedding vocabulary."""

    entries: dict[str, dict] = field(default_factory=dict)
    embeddings: dict[str, list[float]] = field(default_factory=dict)

    @staticmethod
    def load(directory: str | Path) -> "ReplayFixture":
        """Load ``completions.jsonl`` and optional ``embeddings.json`` from a
        fixtures directory."""
        directory = Path(directory)
        fixture = ReplayFixture()
        completions = directory / "completions.jsonl"
        if completions.exists():
            for line in completions.read_text(encoding="utf-8").splitlines():
                if not line.strip():
                    continue
                entry = json.loads(line)
                fixture.entries[entry["fingerprint"]] = entry
        embeddings = directory / "embeddings.json"
        if embeddings.exists():
            fixture.embeddings = json.loads(embeddings.read_text(encoding="utf-8"))
        return fixture

    def add(self, prompt: str, response: str, prompt_tokens: int = 0,
            completion_tokens: int = 0) -> str:
        fp = fingerprint(prompt)
        self.entries[fp] = {"fingerprint": fp, "response": response,
                            "prompt_tokens": prompt_tokens,
                            "completion_tokens": completion_tokens}
        return fp

    def dump(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        lines = [json.dumps(self.entries[fp], sort_keys=True)
                 for fp in sorted(self.entries)]
        (directory / "completions.jsonl").write_text(
            "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        (directory / "embeddings.json").write_text(
            json.dumps(self.embeddings, sort_keys=True, indent=1) + "\n",
            encoding="utf-8")


class ScriptedProvider:
    """Replay provider: exact fixture response or MissingFixture."""

    def __init__(self, fixture: ReplayFixture):
        self.fixture = fixture

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        fp = fingerprint(req.prompt)
        entry = self.fixture.entries.get(fp)
        if entry is None:
            head = normalize_prompt(req.prompt)[:80]
            raise MissingFixture(fp, head)
        return CompletionResponse(text=entry["response"],
                                  prompt_tokens=int(entry.get("prompt_tokens", 0)),
                                  completion_tokens=int(entry.get("completion_tokens", 0)))

    def embed(self, text: str) -> list[float]:
        return embed_text(text, self.fixture.embeddings)


class SequenceProvider:
    """Pops scripted responses from per-tag FIFO queues.

    A response is either a plain string (token counts 0) or a
    ``(text, prompt_tokens, completion_tokens)`` tuple. Tags without their own
    queue fall back to the ``"*"`` queue. Exhausted queues raise
    MissingFixture, which keeps over-calling loud in tests.
    """

    def __init__(self, responses: dict[str, list] | list | None = None,
                 embeddings: dict[str, list[float]] | None = None):
        if isinstance(responses, list):
            responses = {"*": responses}
        self.queues: dict[str, list] = {k: list(v) for k, v in (responses or {}).items()}
        self.embeddings = embeddings or {}
        self.calls: list[tuple[str, str]] = []   # (tag, prompt) log for assertions

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        self.calls.append((req.tag, req.prompt))
        queue = self.queues.get(req.tag)
        if not queue:
            queue = self.queues.get("*")
        if not queue:
            raise MissingFixture(fingerprint(req.prompt),
                                 f"tag {req.tag!r} queue exhausted")
        item = queue.pop(0)
        if isinstance(item, tuple):
            text, pt, ct = item
            return CompletionResponse(text=text, prompt_tokens=pt, completion_tokens=ct)
        return CompletionResponse(text=item)

    def embed(self, text: str) -> list[float]:
        return embed_text(text, self.embeddings)
