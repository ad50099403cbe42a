"""Live HTTP provider (OpenAI-compatible chat/embeddings endpoints).

Never exercised by the test suite; configuration comes from environment
variables so credentials stay out of config files:

    ASKBOOK_PROVIDER_URL   base URL, e.g. https://api.example.com/v1
    ASKBOOK_PROVIDER_KEY   bearer token
    ASKBOOK_PROVIDER_MODEL chat model name (default gpt-4)
    ASKBOOK_EMBED_MODEL    embedding model name
"""

from __future__ import annotations

import os
import threading
import time

import httpx

from ..errors import GatewayTimeout, ProviderError
from .core import CompletionRequest, CompletionResponse

_MAX_RETRIES = 3
_BACKOFF_BASE = 0.5


class LiveProvider:
    """HTTP provider with retry/backoff and bounded in-flight requests."""

    def __init__(self, base_url: str | None = None, api_key: str | None = None,
                 model: str | None = None, embed_model: str | None = None,
                 timeout: float = 60.0, max_in_flight: int = 4):
        self.base_url = (base_url or os.environ.get("ASKBOOK_PROVIDER_URL", "")).rstrip("/")
        if not self.base_url:
            raise ProviderError("no provider URL configured (ASKBOOK_PROVIDER_URL)")
        self.api_key = api_key or os.environ.get("ASKBOOK_PROVIDER_KEY", "")
        self.model = model or os.environ.get("ASKBOOK_PROVIDER_MODEL", "gpt-4")
        self.embed_model = embed_model or os.environ.get(
            "ASKBOOK_EMBED_MODEL", "text-embedding-3-small")
        self.timeout = timeout
        self._slots = threading.Semaphore(max_in_flight)
        self._client = httpx.Client(timeout=timeout)

    def _post(self, path: str, payload: dict) -> dict:
        headers = {"Authorization": f"Bearer {self.api_key}"} if self.api_key else {}
        last: Exception | None = None
        for attempt in range(_MAX_RETRIES):
            try:
                with self._slots:
                    resp = self._client.post(f"{self.base_url}{path}",
                                             json=payload, headers=headers)
                if resp.status_code >= 500:
                    last = ProviderError(f"{path}: server error {resp.status_code}")
                elif resp.status_code >= 400:
                    raise ProviderError(f"{path}: {resp.status_code} {resp.text[:200]}")
                else:
                    return resp.json()
            except httpx.TimeoutException as exc:
                last = GatewayTimeout(f"{path}: {exc}")
            except httpx.HTTPError as exc:
                last = ProviderError(f"{path}: {exc}")
            time.sleep(_BACKOFF_BASE * (2 ** attempt))
        raise last if last else ProviderError(f"{path}: retries exhausted")

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": req.prompt}],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        data = self._post("/chat/completions", payload)
        try:
            text = data["choices"][0]["message"]["content"]
        except (KeyError, IndexError) as exc:
            raise ProviderError(f"unexpected completion payload: {exc}") from exc
        usage = data.get("usage", {})
        return CompletionResponse(text=text,
                                  prompt_tokens=int(usage.get("prompt_tokens", 0)),
                                  completion_tokens=int(usage.get("completion_tokens", 0)))

    def embed(self, text: str) -> list[float]:
        data = self._post("/embeddings", {"model": self.embed_model, "input": text})
        try:
            return list(data["data"][0]["embedding"])
        except (KeyError, IndexError) as exc:
            raise ProviderError(f"unexpected embedding payload: {exc}") from exc
