"""Agent-level data types."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from urllib.parse import urlsplit

from marag.index.records import Locator, SourceKind, locator_from_dict, locator_to_dict

MAX_EXCERPT_CHARS = 300


class AgentKind(str, Enum):
    VIDEO = "video"
    CODE = "code"
    DOCUMENTATION = "documentation"
    INTERNET = "internet"


# The SourceKind of the records each agent consumes. The internet agent
# works on transiently fetched web pages, hence WEB.
AGENT_SOURCE_KIND: dict[AgentKind, SourceKind] = {
    AgentKind.VIDEO: SourceKind.VIDEO,
    AgentKind.CODE: SourceKind.CODE,
    AgentKind.DOCUMENTATION: SourceKind.DOCUMENTATION,
    AgentKind.INTERNET: SourceKind.WEB,
}


@dataclass(frozen=True)
class Citation:
    """A pointer from answer text back into a specific piece of source
    material. ``ref`` is the bracketed id as it appears in the text; the
    excerpt is always a prefix-substring of the cited chunk."""

    kind: SourceKind
    source_url: str
    locator: Locator
    excerpt: str
    chunk_id: str
    ref: str

    def __post_init__(self):
        if len(self.excerpt) > MAX_EXCERPT_CHARS:
            raise ValueError(f"excerpt exceeds {MAX_EXCERPT_CHARS} chars")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "source_url": self.source_url,
            "locator": locator_to_dict(self.locator),
            "excerpt": self.excerpt,
            "chunk_id": self.chunk_id,
            "ref": self.ref,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Citation":
        return cls(
            kind=SourceKind(data["kind"]),
            source_url=data["source_url"],
            locator=locator_from_dict(data["locator"]),
            excerpt=data["excerpt"],
            chunk_id=data["chunk_id"],
            ref=data["ref"],
        )


@dataclass
class AgentAnswer:
    """One agent's contribution to a query, successful or not."""

    kind: AgentKind
    answer_text: str
    citations: list[Citation]
    retrieved_chunk_ids: list[str]
    elapsed_ms: int
    status: str  # "ok" | "failed"
    failure_reason: str | None = None

    def __post_init__(self):
        if self.status not in ("ok", "failed"):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == "ok" and not self.answer_text:
            raise ValueError("ok answers must have text")
        if self.elapsed_ms < 0:
            raise ValueError("elapsed_ms must be non-negative")
        known = set(self.retrieved_chunk_ids)
        for citation in self.citations:
            if citation.chunk_id not in known:
                raise ValueError(
                    f"citation {citation.ref} points at un-retrieved chunk {citation.chunk_id}"
                )


@dataclass(frozen=True)
class WebSearchResult:
    title: str
    url: str
    snippet: str

    def __post_init__(self):
        parts = urlsplit(self.url)
        if parts.scheme not in ("http", "https") or not parts.netloc:
            raise ValueError(f"search result URL must be absolute: {self.url!r}")
