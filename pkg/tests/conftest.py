"""Shared fixtures: upstream stub server, service wiring, schema checking."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from stubs import FixtureServer, populate_standard  # noqa: E402

from marag.gateway.mock import MockGateway
from marag.httpclient import HttpSettings
from marag.ingest.config import SourceConfig
from marag.service.settings import ServiceSettings

SCHEMA_DIR = Path(__file__).resolve().parent.parent / "schemas"


@pytest.fixture
def gateway():
    return MockGateway()


@pytest.fixture
def server():
    srv = FixtureServer()
    populate_standard(srv)
    srv.start()
    yield srv
    srv.stop()


@pytest.fixture
def fast_http():
    """Full retry policy but with negligible backoff, for error-path tests."""
    return HttpSettings(timeout=5.0, attempts=3, backoff_base=0.001)


@pytest.fixture
def no_sleep():
    return lambda seconds: None


def standard_source_config(server: FixtureServer, **overrides) -> SourceConfig:
    """All three fixture sources configured."""
    from stubs import REPO_URL, VIDEO_URL

    fields = dict(
        youtube_url=VIDEO_URL,
        github_url=REPO_URL,
        docs_url=server.url("/docs/index.html"),
        github_content_types=("code", "issue", "pull_request"),
    )
    fields.update(overrides)
    return SourceConfig(**fields)


@pytest.fixture
def source_config(server):
    return standard_source_config(server)


def build_ingestor(server: FixtureServer, store, gateway=None, **overrides):
    """Pipeline wired to the stub upstreams, with negligible retry backoff."""
    from marag.ingest.pipeline import Ingestor

    fields = dict(
        transcript_base_url=server.url("/yt"),
        github_api_base=server.url("/gh"),
        settings=HttpSettings(timeout=5.0, attempts=3, backoff_base=0.001),
        sleep=lambda seconds: None,
    )
    fields.update(overrides)
    return Ingestor(store, gateway or MockGateway(), **fields)


def make_settings(server: FixtureServer, data_dir: Path, **overrides) -> ServiceSettings:
    fields = dict(
        data_dir=str(data_dir),
        mock=True,
        transcript_base_url=server.url("/yt"),
        github_api_base=server.url("/gh"),
        search_base_url=server.base_url,
    )
    fields.update(overrides)
    return ServiceSettings(**fields)


@pytest.fixture
def settings(server, tmp_path):
    return make_settings(server, tmp_path / "data")


@pytest.fixture
def client(settings):
    from fastapi.testclient import TestClient

    from marag.service.app import create_app

    with TestClient(create_app(settings)) as test_client:
        yield test_client


@pytest.fixture(scope="session")
def check_schema():
    """Validator over the shipped JSON schemas, resolving cross-file refs."""
    import jsonschema
    from referencing import Registry, Resource

    contents = {
        path.name: json.loads(path.read_text()) for path in SCHEMA_DIR.glob("*.schema.json")
    }
    assert contents, f"no schemas found in {SCHEMA_DIR}"
    registry = Registry().with_resources(
        [(name, Resource.from_contents(schema)) for name, schema in contents.items()]
    )
    validators = {
        name: jsonschema.Draft7Validator(schema, registry=registry)
        for name, schema in contents.items()
    }

    def check(schema_name: str, payload) -> None:
        validators[f"{schema_name}.schema.json"].validate(payload)

    return check
