"""Split extracted text and transcripts into bounded, overlapping chunks.

Text mode produces spans of at most ``max_chars`` characters. Consecutive
spans overlap by exactly ``overlap_chars``, so stripping each span's leading
overlap and concatenating reproduces the source byte-for-byte. A span ends
early at the rightmost paragraph break in its window, else sentence break,
else whitespace — never before the window's midpoint, which keeps forward
progress guaranteed.

Transcript mode slides a ``window_seconds`` window with stride
``window_seconds - overlap_seconds``; a chunk is the space-joined text of
every segment overlapping its window, so each segment's text lands in at
least one chunk.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from marag.errors import EmptyDocument
from marag.index.records import CodeLocator, DocLocator, Locator, SourceKind, VideoLocator, WebLocator
from marag.ingest.documents import Heading, RawDocument
from marag.ingest.transcript import TranscriptSegment

_SENTENCE_END = re.compile(r"[.!?][ \t\n]")


@dataclass(frozen=True)
class ChunkPolicy:
    max_chars: int = 1500
    overlap_chars: int = 200
    window_seconds: float = 60.0
    overlap_seconds: float = 10.0

    def __post_init__(self):
        if self.max_chars < 1:
            raise ValueError("max_chars must be >= 1")
        if self.overlap_chars < 0 or self.overlap_chars * 2 >= self.max_chars:
            raise ValueError("overlap_chars must satisfy 0 <= overlap_chars < max_chars / 2")
        if self.window_seconds <= 0:
            raise ValueError("window_seconds must be positive")
        if not 0 <= self.overlap_seconds < self.window_seconds:
            raise ValueError("overlap_seconds must be in [0, window_seconds)")


@dataclass(frozen=True)
class TextSpan:
    start: int
    end: int
    text: str


def _find_break(text: str, start: int, hard_end: int, max_chars: int) -> int | None:
    """Rightmost break position in (floor, hard_end], preferring paragraph,
    then sentence, then whitespace boundaries. The floor is the window's
    midpoint; None means cut hard at hard_end."""
    floor = start + max_chars // 2

    para = text.rfind("\n\n", start, hard_end)
    if para != -1 and para + 2 > floor:
        return para + 2

    search_lo = max(start, floor - 1)
    sentence = None
    for match in _SENTENCE_END.finditer(text, search_lo, hard_end):
        if match.end() > floor:
            sentence = match.end()
    if sentence is not None:
        return sentence

    for pos in range(hard_end - 1, floor - 1, -1):
        if text[pos].isspace():
            return pos + 1
    return None


def split_text(text: str, policy: ChunkPolicy = ChunkPolicy()) -> list[TextSpan]:
    """Spans covering the whole text; adjacent spans share exactly
    ``overlap_chars`` characters."""
    if not text:
        raise EmptyDocument("cannot chunk empty text")
    n = len(text)
    spans: list[TextSpan] = []
    start = 0
    while True:
        hard_end = min(start + policy.max_chars, n)
        end = hard_end
        if hard_end < n:
            brk = _find_break(text, start, hard_end, policy.max_chars)
            if brk is not None:
                end = brk
        spans.append(TextSpan(start, end, text[start:end]))
        if end >= n:
            return spans
        start = end - policy.overlap_chars


def stitch_spans(spans: Sequence[TextSpan]) -> str:
    """Inverse of :func:`split_text`: drop each span's leading overlap and
    concatenate."""
    if not spans:
        return ""
    parts = [spans[0].text]
    for prev, span in zip(spans, spans[1:]):
        parts.append(span.text[prev.end - span.start :])
    return "".join(parts)


def _heading_path_at(headings: Sequence[Heading], offset: int) -> tuple[str, ...]:
    """Chain of headings (h1 -> h2 -> ...) active at a character offset."""
    stack: list[Heading] = []
    for heading in headings:
        if heading.offset > offset:
            break
        while stack and stack[-1].level >= heading.level:
            stack.pop()
        stack.append(heading)
    return tuple(h.text for h in stack)


def _line_of(text: str, index: int) -> int:
    return text.count("\n", 0, index) + 1


def chunk_document(doc: RawDocument, policy: ChunkPolicy = ChunkPolicy()) -> list[tuple[str, Locator]]:
    """Chunk one extracted document, attaching a locator per chunk."""
    if not doc.body.strip():
        raise EmptyDocument(f"document from {doc.source_url} is empty")
    spans = split_text(doc.body, policy)
    chunks: list[tuple[str, Locator]] = []
    for span in spans:
        locator: Locator
        if doc.kind == SourceKind.CODE:
            locator = CodeLocator(
                file_path=doc.path or "",
                start_line=_line_of(doc.body, span.start),
                end_line=_line_of(doc.body, max(span.start, span.end - 1)),
                artifact_class=doc.artifact_class,
            )
        elif doc.kind == SourceKind.DOCUMENTATION:
            locator = DocLocator(
                page_url=doc.page_url or doc.source_url,
                heading_path=_heading_path_at(doc.headings, span.start),
            )
        elif doc.kind == SourceKind.WEB:
            locator = WebLocator(page_url=doc.page_url or doc.source_url)
        else:
            raise ValueError(f"cannot chunk {doc.kind.value} via chunk_document")
        chunks.append((span.text, locator))
    return chunks


def _overlaps(seg: TranscriptSegment, window_start: float, window_end: float) -> bool:
    if seg.start_seconds == seg.end_seconds:
        return window_start <= seg.start_seconds <= window_end
    return max(seg.start_seconds, window_start) < min(seg.end_seconds, window_end)


def chunk_transcript(
    segments: Iterable[TranscriptSegment], policy: ChunkPolicy = ChunkPolicy()
) -> list[tuple[str, VideoLocator]]:
    """Sliding-window chunks over transcript segments. Each chunk's locator
    carries its window bounds (end clamped to the transcript's end)."""
    segs = sorted(segments, key=lambda s: (s.start_seconds, s.end_seconds))
    if not segs:
        raise EmptyDocument("cannot chunk empty transcript")
    t_end = max(s.end_seconds for s in segs)
    stride = policy.window_seconds - policy.overlap_seconds
    chunks: list[tuple[str, VideoLocator]] = []
    window_start = segs[0].start_seconds
    while True:
        window_end = window_start + policy.window_seconds
        members = [s for s in segs if _overlaps(s, window_start, window_end)]
        text = " ".join(s.text for s in members if s.text)
        if text:
            chunks.append((text, VideoLocator(window_start, min(window_end, t_end))))
        if window_end >= t_end:
            return chunks
        window_start += stride
