"""Source ingestion: fetch, extract, chunk, embed, index."""

from marag.ingest.chunking import ChunkPolicy, TextSpan, chunk_document, chunk_transcript, split_text
from marag.ingest.config import SourceConfig
from marag.ingest.documents import Heading, RawDocument
from marag.ingest.pipeline import IngestReport, Ingestor, SourceReport
from marag.ingest.transcript import TranscriptSegment, TranscriptClient, normalize_segments

__all__ = [
    "ChunkPolicy",
    "Heading",
    "IngestReport",
    "Ingestor",
    "RawDocument",
    "SourceConfig",
    "SourceReport",
    "TextSpan",
    "TranscriptClient",
    "TranscriptSegment",
    "chunk_document",
    "chunk_transcript",
    "normalize_segments",
    "split_text",
]
