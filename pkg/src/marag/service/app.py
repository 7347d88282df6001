"""HTTP surface: REST endpoints plus the SSE chat stream.

Every error body is the same two-field shape ({code, message}) with a
stable machine code, so clients never parse human text. The chat stream
forwards orchestrator events verbatim as server-sent events — event names
on the wire are exactly the orchestrator's event names.
"""

from __future__ import annotations

import json
from typing import Iterator, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, Field

from marag import __version__
from marag.errors import MaragError
from marag.ingest.config import SourceConfig
from marag.orchestrator.events import DONE, OrchestratorEvent
from marag.service.settings import ServiceSettings
from marag.service.state import ServiceState

_HTTP_STATUS = {
    "invalid_url": 422,
    "invalid_request": 422,
    "invalid_source_config": 422,
    "no_sources": 422,
    "session_not_found": 404,
    "job_not_found": 404,
    "ingest_running": 409,
    "chat_in_flight": 409,
    "session_not_ready": 409,
    "all_agents_failed": 502,
    "provider_error": 502,
    "storage_error": 500,
}


class SourcesBody(BaseModel):
    youtube_url: Optional[str] = None
    github_url: Optional[str] = None
    docs_url: Optional[str] = None
    github_content_types: list[str] = Field(default_factory=lambda: ["code"])
    crawl_limit: int = 50

    def to_config(self) -> SourceConfig:
        return SourceConfig(
            youtube_url=self.youtube_url,
            github_url=self.github_url,
            docs_url=self.docs_url,
            github_content_types=tuple(self.github_content_types),
            crawl_limit=self.crawl_limit,
        )


class ChatBody(BaseModel):
    message: str = Field(min_length=1)


def _sse(event: OrchestratorEvent) -> str:
    return f"event: {event.name}\ndata: {json.dumps(event.payload)}\n\n"


def _sse_error(code: str, message: str) -> str:
    return f"event: error\ndata: {json.dumps({'code': code, 'message': message})}\n\n"


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings.from_env()
    state = ServiceState(settings)
    app = FastAPI(title="marag", version=__version__)
    app.state.marag = state

    @app.exception_handler(MaragError)
    async def marag_error_handler(request: Request, exc: MaragError):
        return JSONResponse(
            status_code=_HTTP_STATUS.get(exc.code, 400),
            content={"code": exc.code, "message": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def value_error_handler(request: Request, exc: ValueError):
        return JSONResponse(
            status_code=422,
            content={"code": "invalid_source_config", "message": str(exc)},
        )

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"code": "invalid_request", "message": str(exc.errors()[:3])},
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__, "mock": settings.mock}

    @app.post("/sessions", status_code=201)
    def create_session():
        return state.create_session().to_dict()

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        return state.get_session(session_id).to_dict()

    @app.put("/sessions/{session_id}/sources")
    def set_sources(session_id: str, body: SourcesBody):
        return state.set_sources(session_id, body.to_config()).to_dict()

    @app.post("/sessions/{session_id}/ingest", status_code=202)
    def start_ingest(session_id: str):
        return state.start_ingest(session_id).to_dict()

    @app.get("/ingest/{job_id}")
    def get_ingest(job_id: str):
        return state.get_job(job_id).to_dict()

    @app.post("/sessions/{session_id}/chat")
    def chat(session_id: str, body: ChatBody, stream: bool = False):
        session = state.get_session(session_id)
        state.begin_chat(session_id)
        if not stream:
            try:
                response = state.orchestrator_for(session_id).orchestrate(body.message, session)
                state.persist_session(session_id)
                return response.to_dict()
            finally:
                state.end_chat(session_id)

        orchestrator = state.orchestrator_for(session_id)
        events = orchestrator.orchestrate_events(body.message, session)
        try:
            first = next(events)  # pre-flight errors become HTTP statuses
        except BaseException:
            state.end_chat(session_id)
            raise

        def event_stream() -> Iterator[str]:
            try:
                yield _sse(first)
                for event in events:
                    yield _sse(event)
                    if event.name == DONE:
                        state.persist_session(session_id)
            except MaragError as exc:
                yield _sse_error(exc.code, str(exc))
            finally:
                state.end_chat(session_id)

        return StreamingResponse(event_stream(), media_type="text/event-stream")

    return app
