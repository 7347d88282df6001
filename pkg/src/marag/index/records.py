"""Record types held by the vector index.

A ``ChunkRecord`` is one unit of indexed text: where it came from
(``SourceKind`` + ``Locator``), the text itself, and its embedding.
Locators are a tagged union — one variant per source kind — so citations
can deep-link back into the original resource.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Iterable, Union

import numpy as np


class SourceKind(str, Enum):
    VIDEO = "video"
    CODE = "code"
    DOCUMENTATION = "documentation"
    WEB = "web"


ARTIFACT_CLASSES = ("code", "issue", "pull_request")


@dataclass(frozen=True)
class VideoLocator:
    """Timestamp range within a video, in seconds."""

    start_seconds: float
    end_seconds: float

    def __post_init__(self):
        if self.start_seconds < 0:
            raise ValueError(f"start_seconds must be non-negative, got {self.start_seconds}")
        if self.end_seconds < self.start_seconds:
            raise ValueError("end_seconds must be >= start_seconds")


@dataclass(frozen=True)
class CodeLocator:
    """File path plus a 1-based inclusive line range within a repository."""

    file_path: str
    start_line: int
    end_line: int
    artifact_class: str = "code"

    def __post_init__(self):
        if self.start_line < 1 or self.end_line < self.start_line:
            raise ValueError(f"bad line range {self.start_line}..{self.end_line}")
        if self.artifact_class not in ARTIFACT_CLASSES:
            raise ValueError(f"unknown artifact_class {self.artifact_class!r}")


@dataclass(frozen=True)
class DocLocator:
    """Documentation page URL plus the heading chain above the chunk."""

    page_url: str
    heading_path: tuple[str, ...] = ()


@dataclass(frozen=True)
class WebLocator:
    """Live web page fetched for one query."""

    page_url: str


Locator = Union[VideoLocator, CodeLocator, DocLocator, WebLocator]

_LOCATOR_KIND: dict[type, SourceKind] = {
    VideoLocator: SourceKind.VIDEO,
    CodeLocator: SourceKind.CODE,
    DocLocator: SourceKind.DOCUMENTATION,
    WebLocator: SourceKind.WEB,
}


def locator_to_dict(locator: Locator) -> dict[str, Any]:
    kind = _LOCATOR_KIND[type(locator)]
    if isinstance(locator, VideoLocator):
        return {
            "type": kind.value,
            "start_seconds": locator.start_seconds,
            "end_seconds": locator.end_seconds,
        }
    if isinstance(locator, CodeLocator):
        return {
            "type": kind.value,
            "file_path": locator.file_path,
            "start_line": locator.start_line,
            "end_line": locator.end_line,
            "artifact_class": locator.artifact_class,
        }
    if isinstance(locator, DocLocator):
        return {
            "type": kind.value,
            "page_url": locator.page_url,
            "heading_path": list(locator.heading_path),
        }
    return {"type": kind.value, "page_url": locator.page_url}


def locator_from_dict(data: dict[str, Any]) -> Locator:
    tag = data.get("type")
    if tag == SourceKind.VIDEO.value:
        return VideoLocator(float(data["start_seconds"]), float(data["end_seconds"]))
    if tag == SourceKind.CODE.value:
        return CodeLocator(
            data["file_path"],
            int(data["start_line"]),
            int(data["end_line"]),
            data.get("artifact_class", "code"),
        )
    if tag == SourceKind.DOCUMENTATION.value:
        return DocLocator(data["page_url"], tuple(data.get("heading_path", ())))
    if tag == SourceKind.WEB.value:
        return WebLocator(data["page_url"])
    raise ValueError(f"unknown locator type {tag!r}")


@dataclass(frozen=True)
class EmbeddingVector:
    """Fixed-dimension vector of finite floats."""

    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("embedding must have at least one dimension")
        for v in self.values:
            if not math.isfinite(v):
                raise ValueError("embedding values must be finite")

    @classmethod
    def of(cls, values: Iterable[float]) -> "EmbeddingVector":
        return cls(tuple(float(v) for v in values))

    @property
    def dim(self) -> int:
        return len(self.values)

    def quantized(self) -> "EmbeddingVector":
        """Round values to float32 — the precision the store and the on-disk
        format keep, so persisted and in-memory vectors are identical."""
        return EmbeddingVector(tuple(float(v) for v in np.asarray(self.values, dtype=np.float32)))


@dataclass(frozen=True)
class ChunkRecord:
    """One indexed chunk of source text."""

    id: str
    session_id: str
    kind: SourceKind
    source_url: str
    locator: Locator
    text: str
    embedding: EmbeddingVector
    ingested_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))
    seq: int = -1

    def __post_init__(self):
        if not self.id:
            raise ValueError("record id must be non-empty")
        if not self.text:
            raise ValueError("record text must be non-empty")
        expected = _LOCATOR_KIND[type(self.locator)]
        if expected != self.kind:
            raise ValueError(f"locator variant {expected.value} does not match kind {self.kind.value}")

    def meta_dict(self) -> dict[str, Any]:
        """JSON-safe metadata (everything except the embedding)."""
        return {
            "id": self.id,
            "session_id": self.session_id,
            "kind": self.kind.value,
            "source_url": self.source_url,
            "locator": locator_to_dict(self.locator),
            "text": self.text,
            "ingested_at": self.ingested_at.isoformat(),
            "seq": self.seq,
        }

    @classmethod
    def from_meta_dict(cls, meta: dict[str, Any], embedding: EmbeddingVector) -> "ChunkRecord":
        return cls(
            id=meta["id"],
            session_id=meta["session_id"],
            kind=SourceKind(meta["kind"]),
            source_url=meta["source_url"],
            locator=locator_from_dict(meta["locator"]),
            text=meta["text"],
            embedding=embedding,
            ingested_at=datetime.fromisoformat(meta["ingested_at"]),
            seq=int(meta["seq"]),
        )
