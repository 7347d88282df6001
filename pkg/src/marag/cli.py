"""Operator command line: run the service, or drive the pipeline headlessly.

    marag serve    — start the HTTP service
    marag ingest   — configure sources on a session and ingest them
    marag ask      — one-shot question against an ingested session
    marag sessions — list sessions in the data directory

Exit codes: 0 success/done, 1 failed, 2 partial ingest, 3 session missing
or not ready, 64 usage error. Results go to stdout, diagnostics to stderr;
``--json`` switches stdout to one machine-readable JSON line.
"""

from __future__ import annotations

import json
import sys

import click

from marag.errors import (
    AllAgentsFailed,
    InvalidUrl,
    MaragError,
    SessionNotFound,
    SessionNotReady,
)
from marag.index.records import (
    CodeLocator,
    DocLocator,
    Locator,
    VideoLocator,
    WebLocator,
)
from marag.ingest.config import SourceConfig
from marag.orchestrator.types import SynthesizedResponse
from marag.service.settings import ServiceSettings
from marag.service.state import ServiceState

_SETTINGS_FLAGS = [
    click.option("--data-dir", default=None, help="Session storage directory (MARAG_DATA_DIR)."),
    click.option("--mock", is_flag=True, default=False, help="Use the deterministic offline gateway."),
    click.option("--transcript-base-url", default=None, help="Caption endpoint base URL."),
    click.option("--github-api-base", default=None, help="Repository API base URL."),
    click.option("--github-token", default=None, help="Repository API token."),
    click.option("--search-base-url", default=None, help="Search provider base URL."),
    click.option("--provider-base-url", default=None, help="Model provider base URL."),
    click.option("--api-key", default=None, help="Model provider API key."),
]


def _with_settings_flags(command):
    for option in reversed(_SETTINGS_FLAGS):
        command = option(command)
    return command


def _settings(**flags) -> ServiceSettings:
    """Environment settings with non-empty CLI flags layered on top."""
    overrides = {key: value for key, value in flags.items() if value not in (None, False)}
    return ServiceSettings.from_env(**overrides)


def format_locator(locator: Locator) -> str:
    if isinstance(locator, VideoLocator):
        return f"{locator.start_seconds:.0f}s-{locator.end_seconds:.0f}s"
    if isinstance(locator, CodeLocator):
        return f"{locator.file_path} lines {locator.start_line}-{locator.end_line}"
    if isinstance(locator, DocLocator):
        path = " > ".join(locator.heading_path)
        return f"{locator.page_url}" + (f" ({path})" if path else "")
    if isinstance(locator, WebLocator):
        return locator.page_url
    return str(locator)


def print_response(response: SynthesizedResponse, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps(response.to_dict()))
        return
    click.echo(response.answer_text)
    if response.citations:
        click.echo("")
        for i, citation in enumerate(response.citations, start=1):
            click.echo(f"  [{i}] {citation.source_url} — {format_locator(citation.locator)}")
    if response.degraded:
        failed = [r.agent.value for r in response.agent_reports if r.status == "failed"]
        click.echo(f"note: degraded answer; failed agents: {', '.join(failed)}", err=True)


@click.group()
def cli():
    """Multi-agent retrieval service for learning from video, code, and docs."""


@cli.command()
@click.option("--host", default=None, help="Bind address (MARAG_HOST).")
@click.option("--port", default=None, type=int, help="Bind port (MARAG_PORT).")
@_with_settings_flags
def serve(host, port, **flags) -> int:
    """Run the HTTP service."""
    import uvicorn

    from marag.service.app import create_app

    settings = _settings(host=host, port=port, **flags)
    uvicorn.run(create_app(settings), host=settings.host, port=settings.port)
    return 0


@cli.command()
@click.option("--youtube", default=None, help="Video URL to ingest.")
@click.option("--github", default=None, help="Repository URL to ingest.")
@click.option("--docs", default=None, help="Documentation root URL to crawl.")
@click.option(
    "--github-types",
    default="code",
    show_default=True,
    help="Comma-separated subset of code,issue,pull_request.",
)
@click.option("--crawl-limit", default=50, show_default=True, type=int)
@click.option("--session", "session_id", default=None, help="Existing session id to re-ingest.")
@click.option("--json", "as_json", is_flag=True, default=False)
@_with_settings_flags
def ingest(youtube, github, docs, github_types, crawl_limit, session_id, as_json, **flags) -> int:
    """Configure sources on a session and ingest them."""
    if not any((youtube, github, docs)):
        raise click.UsageError("at least one of --youtube / --github / --docs is required")
    try:
        config = SourceConfig(
            youtube_url=youtube,
            github_url=github,
            docs_url=docs,
            github_content_types=tuple(t.strip() for t in github_types.split(",") if t.strip()),
            crawl_limit=crawl_limit,
        )
    except ValueError as exc:
        raise click.UsageError(str(exc)) from exc

    state = ServiceState(_settings(**flags))
    if session_id is None:
        session = state.create_session()
    else:
        try:
            session = state.get_session(session_id)
        except SessionNotFound as exc:
            click.echo(f"error: {exc}", err=True)
            return 3
    try:
        state.set_sources(session.id, config)
    except InvalidUrl as exc:
        raise click.UsageError(str(exc)) from exc

    job = state.run_ingest_blocking(session.id)
    report = job.report
    if as_json:
        click.echo(json.dumps(job.to_dict()))
    else:
        click.echo(f"session: {session.id}")
        click.echo(f"state: {job.state}")
        for source in report.sources:
            click.echo(
                f"  {source.kind.value:<13} {source.source_url}  "
                f"documents={source.documents_fetched} chunks={source.chunks_indexed}"
            )
        for url, code, message in report.errors:
            click.echo(f"error [{code}] {url}: {message}", err=True)
    return {"done": 0, "partial": 2, "failed": 1}[job.state]


@cli.command()
@click.option("--session", "session_id", required=True, help="Session id to query.")
@click.option("--question", required=True, help="The question to ask.")
@click.option("--json", "as_json", is_flag=True, default=False)
@_with_settings_flags
def ask(session_id, question, as_json, **flags) -> int:
    """Ask one question against an ingested session."""
    state = ServiceState(_settings(**flags))
    try:
        session = state.get_session(session_id)
        response = state.orchestrator_for(session_id).orchestrate(question, session)
    except (SessionNotFound, SessionNotReady) as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except (AllAgentsFailed, MaragError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    state.persist_session(session_id)
    print_response(response, as_json)
    return 0


@cli.command()
@click.option("--json", "as_json", is_flag=True, default=False)
@_with_settings_flags
def sessions(as_json, **flags) -> int:
    """List sessions in the data directory."""
    state = ServiceState(_settings(**flags))
    rows = []
    for session_id in state.list_session_ids():
        session = state.get_session(session_id)
        rows.append(
            {
                "id": session.id,
                "ingest_state": session.ingest_state,
                "turns": len(session.history),
                "created_at": session.created_at.isoformat(),
            }
        )
    if as_json:
        click.echo(json.dumps(rows))
    else:
        for row in rows:
            click.echo(
                f"{row['id']}  {row['ingest_state']:<8} turns={row['turns']}  {row['created_at']}"
            )
    return 0


def main(argv: list[str] | None = None) -> int:
    """Dispatch and translate outcomes into exit codes."""
    try:
        result = cli.main(args=argv, standalone_mode=False)
    except click.UsageError as exc:
        exc.show(file=sys.stderr)
        return 64
    except click.ClickException as exc:
        exc.show(file=sys.stderr)
        return 1
    except click.exceptions.Abort:
        return 130
    except MaragError as exc:
        click.echo(f"error [{exc.code}]: {exc}", err=True)
        return 1
    return result if isinstance(result, int) else 0


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
