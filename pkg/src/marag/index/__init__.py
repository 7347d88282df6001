"""Embedded vector index: chunk records, filtered cosine search, persistence."""

from marag.index.records import (
    ChunkRecord,
    CodeLocator,
    DocLocator,
    EmbeddingVector,
    Locator,
    SourceKind,
    VideoLocator,
    WebLocator,
    locator_from_dict,
    locator_to_dict,
)
from marag.index.store import FORMAT_VERSION, MAGIC, VectorStore

__all__ = [
    "ChunkRecord",
    "CodeLocator",
    "DocLocator",
    "EmbeddingVector",
    "FORMAT_VERSION",
    "Locator",
    "MAGIC",
    "SourceKind",
    "VectorStore",
    "VideoLocator",
    "WebLocator",
    "locator_from_dict",
    "locator_to_dict",
]
