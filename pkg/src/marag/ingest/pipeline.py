"""The ingestion pipeline: fetch, chunk, embed, index.

Each configured source (video transcript, repository, documentation site)
runs as its own pipeline; the three run concurrently but are isolated, so
one failing source never blocks the others. Within a source the flow is
sequential: clear previous records for that source, fetch raw content,
chunk with locators, embed in batches, upsert.

Re-running ingest with unchanged sources reproduces the same records —
chunk ids are content-derived and replacement is delete-then-insert.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable

from marag.errors import MaragError
from marag.gateway.base import ModelGateway
from marag.httpclient import HttpSettings
from marag.index.records import ChunkRecord, EmbeddingVector, Locator, SourceKind, locator_to_dict
from marag.index.store import VectorStore
from marag.ingest.chunking import ChunkPolicy, chunk_document, chunk_transcript
from marag.ingest.config import SourceConfig
from marag.ingest.crawler import crawl_docs
from marag.ingest.github import fetch_github_content
from marag.ingest.transcript import TranscriptClient


@dataclass
class SourceReport:
    """Outcome of one source's pipeline."""

    kind: SourceKind
    source_url: str
    documents_fetched: int = 0
    chunks_indexed: int = 0
    errors: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "source_url": self.source_url,
            "documents_fetched": self.documents_fetched,
            "chunks_indexed": self.chunks_indexed,
            "errors": [
                {"source_url": u, "error_code": c, "message": m} for (u, c, m) in self.errors
            ],
        }


@dataclass
class IngestReport:
    """Aggregate outcome of one ingest run."""

    sources: list[SourceReport]
    started_at: datetime
    finished_at: datetime

    @property
    def documents_fetched(self) -> int:
        return sum(s.documents_fetched for s in self.sources)

    @property
    def chunks_indexed(self) -> int:
        return sum(s.chunks_indexed for s in self.sources)

    @property
    def errors(self) -> list[tuple[str, str, str]]:
        return [e for s in self.sources for e in s.errors]

    @property
    def status(self) -> str:
        """'ready' if everything landed, 'partial' if some source produced
        chunks while another failed, 'failed' if nothing landed."""
        if not self.errors:
            return "ready"
        if self.chunks_indexed > 0:
            return "partial"
        return "failed"

    def to_dict(self) -> dict:
        return {
            "sources": [s.to_dict() for s in self.sources],
            "documents_fetched": self.documents_fetched,
            "chunks_indexed": self.chunks_indexed,
            "errors": [
                {"source_url": u, "error_code": c, "message": m} for (u, c, m) in self.errors
            ],
            "status": self.status,
            "started_at": self.started_at.isoformat(),
            "finished_at": self.finished_at.isoformat(),
        }


def chunk_id(session_id: str, source_url: str, locator: Locator, text: str) -> str:
    """Content-derived record id, stable across identical ingest runs."""
    payload = json.dumps(
        [session_id, source_url, locator_to_dict(locator), text],
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:32]


class Ingestor:
    """Runs the fetch → chunk → embed → upsert flow for one session."""

    def __init__(
        self,
        store: VectorStore,
        gateway: ModelGateway,
        *,
        transcript_base_url: str,
        github_api_base: str = "https://api.github.com",
        github_token: str | None = None,
        policy: ChunkPolicy = ChunkPolicy(),
        settings: HttpSettings = HttpSettings(),
        sleep: Callable[[float], None] = time.sleep,
    ):
        self._store = store
        self._gateway = gateway
        self._transcript_base_url = transcript_base_url
        self._github_api_base = github_api_base
        self._github_token = github_token
        self._policy = policy
        self._settings = settings
        self._sleep = sleep

    def ingest(self, session_id: str, config: SourceConfig) -> IngestReport:
        """Ingest every configured source; failures are reported, not raised."""
        started = datetime.now(timezone.utc)
        pipelines: list[tuple[SourceKind, str, Callable[[], tuple[int, list[tuple[str, Locator]], list]]]] = []
        if config.youtube_url:
            pipelines.append(
                (SourceKind.VIDEO, config.youtube_url, lambda: self._fetch_video(config))
            )
        if config.github_url:
            pipelines.append(
                (SourceKind.CODE, config.github_url, lambda: self._fetch_github(config))
            )
        if config.docs_url:
            pipelines.append(
                (SourceKind.DOCUMENTATION, config.docs_url, lambda: self._fetch_docs(config))
            )

        reports: list[SourceReport] = []
        if pipelines:
            with ThreadPoolExecutor(max_workers=len(pipelines)) as pool:
                futures = [
                    pool.submit(self._run_pipeline, session_id, kind, url, fetch)
                    for kind, url, fetch in pipelines
                ]
                reports = [f.result() for f in futures]
        return IngestReport(
            sources=reports, started_at=started, finished_at=datetime.now(timezone.utc)
        )

    # -- per-source pipelines ------------------------------------------------

    def _run_pipeline(
        self,
        session_id: str,
        kind: SourceKind,
        source_url: str,
        fetch: Callable[[], tuple[int, list[tuple[str, Locator, SourceKind]], list]],
    ) -> SourceReport:
        report = SourceReport(kind=kind, source_url=source_url)
        self._store.delete_by_source(session_id, source_url)
        try:
            fetched, chunks, soft_errors = fetch()
        except MaragError as exc:
            report.errors.append((source_url, exc.code, str(exc)))
            return report
        except Exception as exc:  # isolation: a broken pipeline must not leak
            report.errors.append((source_url, "internal", f"{type(exc).__name__}: {exc}"))
            return report
        report.documents_fetched = fetched
        report.errors.extend(soft_errors)
        try:
            records = self._embed_chunks(session_id, source_url, chunks)
            report.chunks_indexed = self._store.upsert(records)
        except MaragError as exc:
            report.errors.append((source_url, exc.code, str(exc)))
        except Exception as exc:
            report.errors.append((source_url, "internal", f"{type(exc).__name__}: {exc}"))
        return report

    def _embed_chunks(
        self,
        session_id: str,
        source_url: str,
        chunks: list[tuple[str, Locator, SourceKind]],
    ) -> list[ChunkRecord]:
        texts = [text for text, _, _ in chunks]
        vectors: list[EmbeddingVector] = []
        limit = self._gateway.batch_limit
        for lo in range(0, len(texts), limit):
            vectors.extend(self._gateway.embed(texts[lo : lo + limit]))
        return [
            ChunkRecord(
                id=chunk_id(session_id, source_url, locator, text),
                session_id=session_id,
                kind=kind,
                source_url=source_url,
                locator=locator,
                text=text,
                embedding=vector,
            )
            for (text, locator, kind), vector in zip(chunks, vectors)
        ]

    def _fetch_video(self, config: SourceConfig):
        client = TranscriptClient(
            self._transcript_base_url, settings=self._settings, sleep=self._sleep
        )
        try:
            segments = client.fetch(config.youtube_url)
        finally:
            client.close()
        chunks = [
            (text, locator, SourceKind.VIDEO)
            for text, locator in chunk_transcript(segments, self._policy)
        ]
        return 1, chunks, []

    def _fetch_github(self, config: SourceConfig):
        documents = fetch_github_content(
            config.github_url,
            config.github_content_types,
            api_base=self._github_api_base,
            token=self._github_token,
            settings=self._settings,
            sleep=self._sleep,
        )
        chunks = []
        for doc in documents:
            chunks.extend(
                (text, locator, doc.kind) for text, locator in chunk_document(doc, self._policy)
            )
        return len(documents), chunks, []

    def _fetch_docs(self, config: SourceConfig):
        soft_errors: list[tuple[str, str, str]] = []

        def on_error(url: str, code: str, message: str) -> None:
            soft_errors.append((url, code, message))

        documents = crawl_docs(
            config.docs_url,
            config.crawl_limit,
            settings=self._settings,
            sleep=self._sleep,
            on_error=on_error,
        )
        chunks = []
        for doc in documents:
            chunks.extend(
                (text, locator, doc.kind) for text, locator in chunk_document(doc, self._policy)
            )
        return len(documents), chunks, soft_errors
