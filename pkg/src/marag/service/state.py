"""In-process service state: component wiring, session cache, job registry.

Sessions and their vector indexes live on disk (see storage) and are cached
in memory once loaded. Per-session invariants enforced here:

  * at most one running ingest job per session,
  * at most one in-flight chat per session,
  * session mutation serialized by a per-session lock.

The same state object backs both the HTTP app and the CLI, which is what
keeps their answers byte-identical for identical inputs.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone

from marag.agents.answer import AgentRuntime
from marag.agents.websearch import SearchClient
from marag.errors import (
    ChatInFlight,
    IngestRunning,
    InvalidUrl,
    JobNotFound,
    NoSources,
)
from marag.gateway.base import ModelGateway
from marag.gateway.mock import MockGateway
from marag.gateway.openai_http import OpenAIStyleGateway
from marag.index.store import VectorStore
from marag.ingest.config import SourceConfig
from marag.ingest.github import parse_repo_url
from marag.ingest.pipeline import IngestReport, Ingestor
from marag.ingest.transcript import extract_video_id
from marag.orchestrator.manager import Orchestrator
from marag.orchestrator.session import Session
from marag.service.settings import ServiceSettings
from marag.service.storage import SessionStorage

JOB_STATES = ("queued", "running", "done", "failed", "partial")


@dataclass
class IngestJob:
    job_id: str
    session_id: str
    state: str = "queued"
    report: IngestReport | None = None

    def to_dict(self) -> dict:
        return {
            "job_id": self.job_id,
            "session_id": self.session_id,
            "state": self.state,
            "report": self.report.to_dict() if self.report else None,
        }


def build_gateway(settings: ServiceSettings) -> ModelGateway:
    if settings.mock:
        return MockGateway()
    return OpenAIStyleGateway(
        base_url=settings.provider_base_url,
        api_key=settings.api_key,
        chat_model=settings.chat_model,
        embed_model=settings.embed_model,
        embedding_dim=settings.embed_dim,
    )


def _crash_report(config: SourceConfig, exc: Exception) -> IngestReport:
    """Report for a run that died outside the per-source pipelines (e.g. a
    storage failure): every configured source gets the error."""
    from marag.index.records import SourceKind
    from marag.ingest.pipeline import SourceReport

    now = datetime.now(timezone.utc)
    message = f"{type(exc).__name__}: {exc}"
    configured = [
        (SourceKind.VIDEO, config.youtube_url),
        (SourceKind.CODE, config.github_url),
        (SourceKind.DOCUMENTATION, config.docs_url),
    ]
    sources = [
        SourceReport(kind=kind, source_url=url, errors=[(url, "internal", message)])
        for kind, url in configured
        if url
    ]
    return IngestReport(sources=sources, started_at=now, finished_at=now)


def validate_source_config(config: SourceConfig) -> None:
    """URL-syntax validation beyond SourceConfig's own field checks."""
    if config.youtube_url:
        extract_video_id(config.youtube_url)
    if config.github_url:
        parse_repo_url(config.github_url)
    if config.docs_url and not config.docs_url.startswith(("http://", "https://")):
        raise InvalidUrl(f"docs_url must be http(s): {config.docs_url!r}")


class ServiceState:
    def __init__(self, settings: ServiceSettings):
        self.settings = settings
        self.storage = SessionStorage(settings.data_dir)
        self.gateway = build_gateway(settings)
        self.search: SearchClient | None = None
        if settings.search_base_url:
            self.search = SearchClient(settings.search_base_url, settings.search_api_key)

        self._sessions: dict[str, Session] = {}
        self._stores: dict[str, VectorStore] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._chat_inflight: set[str] = set()
        self._ingesting: set[str] = set()
        self.jobs: dict[str, IngestJob] = {}
        self._registry_lock = threading.Lock()

    # -- session registry -----------------------------------------------------

    def lock_for(self, session_id: str) -> threading.RLock:
        with self._registry_lock:
            if session_id not in self._locks:
                self._locks[session_id] = threading.RLock()
            return self._locks[session_id]

    def create_session(self) -> Session:
        session = Session.create()
        self.storage.save_session(session)
        with self._registry_lock:
            self._sessions[session.id] = session
            self._stores[session.id] = VectorStore(self.gateway.embedding_dim)
        return session

    def get_session(self, session_id: str) -> Session:
        with self._registry_lock:
            cached = self._sessions.get(session_id)
        if cached is not None:
            return cached
        session = self.storage.load_session(session_id)  # raises SessionNotFound
        with self._registry_lock:
            return self._sessions.setdefault(session_id, session)

    def get_store(self, session_id: str) -> VectorStore:
        with self._registry_lock:
            cached = self._stores.get(session_id)
        if cached is not None:
            return cached
        self.get_session(session_id)  # existence check
        store = self.storage.load_index(session_id, self.gateway.embedding_dim)
        with self._registry_lock:
            return self._stores.setdefault(session_id, store)

    def list_session_ids(self) -> list[str]:
        return self.storage.list_ids()

    # -- sources ----------------------------------------------------------------

    def set_sources(self, session_id: str, config: SourceConfig) -> Session:
        session = self.get_session(session_id)
        with self.lock_for(session_id):
            if session_id in self._ingesting:
                raise IngestRunning(f"session {session_id} is ingesting; try again later")
            validate_source_config(config)
            session.source_config = config
            self.storage.save_session(session)
        return session

    # -- ingestion ----------------------------------------------------------------

    def _ingestor(self, store: VectorStore) -> Ingestor:
        return Ingestor(
            store,
            self.gateway,
            transcript_base_url=self.settings.transcript_base_url,
            github_api_base=self.settings.github_api_base,
            github_token=self.settings.github_token,
        )

    def start_ingest(self, session_id: str) -> IngestJob:
        """Kick off a background ingest job for the session's sources."""
        session = self.get_session(session_id)
        with self.lock_for(session_id):
            if session_id in self._ingesting:
                raise IngestRunning(f"session {session_id} already has a running ingest job")
            if not session.source_config.any_configured:
                raise NoSources(f"session {session_id} has no sources configured")
            self._ingesting.add(session_id)
            job = IngestJob(job_id=uuid.uuid4().hex[:12], session_id=session_id)
            self.jobs[job.job_id] = job
            session.ingest_state = "running"
            self.storage.save_session(session)

        thread = threading.Thread(
            target=self._run_ingest_job, args=(job,), name=f"ingest-{session_id}", daemon=True
        )
        thread.start()
        return job

    def run_ingest_blocking(self, session_id: str) -> IngestJob:
        """Synchronous ingest (CLI path): same flow, same state transitions."""
        job = self.start_ingest(session_id)
        self.wait_for_job(job.job_id)
        return job

    def wait_for_job(self, job_id: str, timeout: float = 300.0) -> IngestJob:
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            job = self.get_job(job_id)
            if job.state in ("done", "failed", "partial"):
                return job
            time.sleep(0.02)
        raise TimeoutError(f"ingest job {job_id} did not finish within {timeout}s")

    def _run_ingest_job(self, job: IngestJob) -> None:
        job.state = "running"
        session = self.get_session(job.session_id)
        store = self.get_store(job.session_id)
        try:
            report = self._ingestor(store).ingest(job.session_id, session.source_config)
            with self.lock_for(job.session_id):
                session.ingest_state = {
                    "ready": "ready",
                    "partial": "partial",
                    "failed": "empty",
                }[report.status]
                self.storage.save_index(job.session_id, store)
                self.storage.save_session(session)
            job.report = report
            job.state = {"ready": "done", "partial": "partial", "failed": "failed"}[
                report.status
            ]
        except Exception as exc:  # defensive: job must reach a terminal state
            job.report = _crash_report(session.source_config, exc)
            job.state = "failed"
            with self.lock_for(job.session_id):
                session.ingest_state = "empty"
                self.storage.save_session(session)
        finally:
            with self.lock_for(job.session_id):
                self._ingesting.discard(job.session_id)

    def get_job(self, job_id: str) -> IngestJob:
        job = self.jobs.get(job_id)
        if job is None:
            raise JobNotFound(f"no ingest job {job_id!r}")
        return job

    # -- chat -----------------------------------------------------------------------

    def orchestrator_for(self, session_id: str) -> Orchestrator:
        store = self.get_store(session_id)
        runtime = AgentRuntime(store, self.gateway, search=self.search)
        return Orchestrator(
            runtime,
            self.gateway,
            internet_enabled=self.settings.internet_agent_enabled,
            agent_timeout=self.settings.agent_timeout,
            synthesis_timeout=self.settings.synthesis_timeout,
        )

    def begin_chat(self, session_id: str) -> None:
        with self.lock_for(session_id):
            if session_id in self._chat_inflight:
                raise ChatInFlight(f"session {session_id} already has a chat in flight")
            self._chat_inflight.add(session_id)

    def end_chat(self, session_id: str) -> None:
        with self.lock_for(session_id):
            self._chat_inflight.discard(session_id)

    def persist_session(self, session_id: str) -> None:
        with self.lock_for(session_id):
            self.storage.save_session(self.get_session(session_id))
