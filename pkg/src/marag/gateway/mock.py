"""Deterministic offline gateway used by every test and by --mock mode.

Embeddings follow a fixed recipe so any process on any platform produces
bit-identical vectors for the same text:

    seed   = FNV-1a 64-bit hash of the UTF-8 text
    stream = successive splitmix64 outputs from that seed
    value  = top 53 bits of each output mapped linearly onto [-1, 1)
    vector = the first 64 values, L2-normalized

Generation returns a canned template built from the request itself: the
tail of the last user message plus every bracketed context id found in the
conversation. That is enough for end-to-end assertions — answers echo the
question and "cite" exactly the context they were shown.
"""

from __future__ import annotations

import math
import re
from typing import Iterator, Sequence

from marag.index.records import EmbeddingVector
from marag.gateway.base import GenerationRequest, ModelGateway

MOCK_DIM = 64

_MASK64 = (1 << 64) - 1
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_CONTEXT_REF = re.compile(r"\[(?:video|code|documentation|web):\d+\]")


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def mock_embedding_values(text: str, dim: int = MOCK_DIM) -> list[float]:
    """The normative mock embedding for ``text``: deterministic, unit-norm."""
    state = _fnv1a64(text.encode("utf-8"))
    values = []
    for _ in range(dim):
        state, out = _splitmix64(state)
        values.append((out >> 11) / float(1 << 53) * 2.0 - 1.0)
    norm = math.sqrt(sum(v * v for v in values))
    if norm == 0.0:
        values[0] = 1.0
        norm = 1.0
    return [v / norm for v in values]


class MockGateway(ModelGateway):
    """Fully deterministic gateway; no network, no randomness."""

    embedding_dim = MOCK_DIM

    def __init__(self, *, echo_chars: int = 400, delta_size: int = 24):
        self._echo_chars = echo_chars
        self._delta_size = delta_size

    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        self.check_embed_input(texts)
        return [EmbeddingVector.of(mock_embedding_values(t)) for t in texts]

    def generate(self, request: GenerationRequest) -> str:
        refs: list[str] = []
        seen = set()
        for msg in request.messages:
            for ref in _CONTEXT_REF.findall(msg.content):
                if ref not in seen:
                    seen.add(ref)
                    refs.append(ref)
        tail = request.last_user_text()[-self._echo_chars:]
        text = f"[mock-answer] {tail}"
        if refs:
            text += "\nSources: " + " ".join(refs)
        return text

    def generate_stream(self, request: GenerationRequest) -> Iterator[str]:
        text = self.generate(request)
        for start in range(0, len(text), self._delta_size):
            yield text[start : start + self._delta_size]
