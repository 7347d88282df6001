"""Extracted source content on its way to the chunker."""

from __future__ import annotations

from dataclasses import dataclass, field

from marag.index.records import SourceKind


@dataclass(frozen=True)
class Heading:
    """A heading inside extracted page text, by character offset."""

    offset: int
    level: int
    text: str


@dataclass(frozen=True)
class RawDocument:
    """Plain text extracted from one fetched artifact, plus the seed the
    chunker needs to build locators: file path and artifact class for code,
    page URL and headings for documentation/web."""

    kind: SourceKind
    source_url: str
    body: str
    path: str | None = None
    artifact_class: str = "code"
    page_url: str | None = None
    headings: tuple[Heading, ...] = ()

    def __post_init__(self):
        if not self.body:
            raise ValueError("document body must be non-empty")
        if self.kind == SourceKind.CODE and not self.path:
            raise ValueError("code documents need a file path")
        if self.kind in (SourceKind.DOCUMENTATION, SourceKind.WEB) and not self.page_url:
            raise ValueError(f"{self.kind.value} documents need a page_url")
