"""HTTP gateway speaking the OpenAI-compatible wire shape.

One provider instance covers both chat completions and embeddings; the base
URL, API key, and model names come from configuration so any compatible
endpoint (or a local stub) can back it.
"""

from __future__ import annotations

import json
import threading
import time
from typing import Callable, Iterator, Sequence

import httpx

from marag.errors import ContextTooLarge, GatewayTimeout, ProviderError, RateLimited
from marag.httpclient import HttpSettings, request_with_retries
from marag.index.records import EmbeddingVector
from marag.gateway.base import GenerationRequest, ModelGateway


class OpenAIStyleGateway(ModelGateway):
    def __init__(
        self,
        base_url: str,
        api_key: str | None = None,
        *,
        chat_model: str = "gpt-4o-mini",
        embed_model: str = "text-embedding-3-small",
        embedding_dim: int = 1536,
        batch_limit: int = 64,
        max_concurrency: int = 4,
        settings: HttpSettings = HttpSettings(),
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.embedding_dim = embedding_dim
        self.batch_limit = batch_limit
        self._chat_model = chat_model
        self._embed_model = embed_model
        self._settings = settings
        self._sleep = sleep
        self._semaphore = threading.BoundedSemaphore(max_concurrency)
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(
            base_url=base_url.rstrip("/"), headers=headers, timeout=settings.timeout
        )

    def close(self) -> None:
        self._client.close()

    # --- error mapping ----------------------------------------------------

    def _request(self, path: str, payload: dict) -> httpx.Response:
        try:
            with self._semaphore:
                response = request_with_retries(
                    self._client,
                    "POST",
                    path,
                    json=payload,
                    settings=self._settings,
                    sleep=self._sleep,
                )
        except httpx.TimeoutException as exc:
            raise GatewayTimeout(f"provider timed out: {exc}") from exc
        except httpx.TransportError as exc:
            raise ProviderError(f"provider unreachable: {exc}") from exc
        return self._raise_for_status(response)

    @staticmethod
    def _raise_for_status(response: httpx.Response) -> httpx.Response:
        if response.status_code == 429:
            raise RateLimited("provider rate limit")
        if response.status_code == 400 and b"context" in response.content.lower():
            raise ContextTooLarge(response.text)
        if response.status_code >= 400:
            raise ProviderError(f"provider returned {response.status_code}: {response.text[:200]}")
        return response

    # --- operations -------------------------------------------------------

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        self.check_embed_input(texts)
        response = self._request(
            "/v1/embeddings", {"model": self._embed_model, "input": list(texts)}
        )
        data = sorted(response.json()["data"], key=lambda item: item["index"])
        vectors = [EmbeddingVector.of(item["embedding"]) for item in data]
        if len(vectors) != len(texts):
            raise ProviderError(f"expected {len(texts)} embeddings, got {len(vectors)}")
        for vec in vectors:
            if vec.dim != self.embedding_dim:
                raise ProviderError(f"provider returned dim {vec.dim}, expected {self.embedding_dim}")
        return vectors

    def _chat_payload(self, request: GenerationRequest, stream: bool) -> dict:
        return {
            "model": self._chat_model,
            "messages": [{"role": m.role, "content": m.content} for m in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
            "stream": stream,
        }

    def generate(self, request: GenerationRequest) -> str:
        response = self._request("/v1/chat/completions", self._chat_payload(request, False))
        try:
            return response.json()["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, json.JSONDecodeError) as exc:
            raise ProviderError(f"malformed completion response: {exc}") from exc

    def generate_stream(self, request: GenerationRequest) -> Iterator[str]:
        payload = self._chat_payload(request, True)
        for attempt in range(1, self._settings.attempts + 1):
            if attempt > 1:
                self._sleep(self._settings.backoff_for(attempt))
            try:
                with self._semaphore, self._client.stream(
                    "POST", "/v1/chat/completions", json=payload
                ) as response:
                    if response.status_code == 429 or response.status_code >= 500:
                        if attempt < self._settings.attempts:
                            continue
                    if response.status_code != 200:
                        response.read()
                        self._raise_for_status(response)
                    yield from self._iter_deltas(response)
                    return
            except httpx.TimeoutException as exc:
                if attempt >= self._settings.attempts:
                    raise GatewayTimeout(f"provider timed out: {exc}") from exc
            except httpx.TransportError as exc:
                if attempt >= self._settings.attempts:
                    raise ProviderError(f"provider unreachable: {exc}") from exc

    @staticmethod
    def _iter_deltas(response: httpx.Response) -> Iterator[str]:
        for line in response.iter_lines():
            if not line.startswith("data:"):
                continue
            data = line[len("data:") :].strip()
            if data == "[DONE]":
                return
            try:
                delta = json.loads(data)["choices"][0].get("delta", {})
            except (KeyError, IndexError, json.JSONDecodeError) as exc:
                raise ProviderError(f"malformed stream chunk: {exc}") from exc
            content = delta.get("content")
            if content:
                yield content
