"""Gateway contract: message shapes plus the provider interface."""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from marag.index.records import EmbeddingVector

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if self.role in ("user", "assistant") and not self.content:
            raise ValueError(f"{self.role} message content must be non-empty")


@dataclass(frozen=True)
class GenerationRequest:
    """A chat-completion request: one leading system message, then strictly
    alternating user/assistant turns ending on a user message."""

    messages: tuple[ChatMessage, ...]
    temperature: float = 0.2
    max_tokens: int = 1024
    stream: bool = False

    def __post_init__(self):
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.messages[0].role != "system":
            raise ValueError("first message must be the system message")
        expected = "user"
        for msg in self.messages[1:]:
            if msg.role != expected:
                raise ValueError(
                    f"roles must alternate user/assistant after the system message, got {msg.role!r}"
                )
            expected = "assistant" if expected == "user" else "user"
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature must be in [0, 2], got {self.temperature}")
        if self.max_tokens <= 0:
            raise ValueError(f"max_tokens must be positive, got {self.max_tokens}")

    @classmethod
    def of(cls, messages: Sequence[ChatMessage], **kwargs) -> "GenerationRequest":
        return cls(messages=tuple(messages), **kwargs)

    def last_user_text(self) -> str:
        for msg in reversed(self.messages):
            if msg.role == "user":
                return msg.content
        return ""


class ModelGateway(abc.ABC):
    """Chat + embedding provider. Implementations are reentrant: concurrent
    calls are permitted, bounded by a per-provider request cap."""

    #: dimension of vectors returned by :meth:`embed`
    embedding_dim: int
    #: maximum number of texts accepted per embed() call
    batch_limit: int = 64

    @abc.abstractmethod
    def embed(self, texts: Sequence[str]) -> list[EmbeddingVector]:
        """One vector per input text, order preserved, uniform dimension."""

    @abc.abstractmethod
    def generate(self, request: GenerationRequest) -> str:
        """Full completion text."""

    @abc.abstractmethod
    def generate_stream(self, request: GenerationRequest) -> Iterator[str]:
        """Completion as text deltas; concatenation equals :meth:`generate`
        output for identical inputs on deterministic providers."""

    def check_embed_input(self, texts: Sequence[str]) -> None:
        if not texts:
            raise ValueError("embed() requires at least one text")
        if len(texts) > self.batch_limit:
            raise ValueError(f"embed() batch of {len(texts)} exceeds limit {self.batch_limit}")
        for i, text in enumerate(texts):
            if not text:
                raise ValueError(f"embed() text at position {i} is empty")
