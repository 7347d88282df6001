"""Whole-stack acceptance checks.

Each class exercises one user-visible guarantee end to end, on the
deterministic mock model backend and the local fixture server: index
fidelity, persistence, chunking, ingestion isolation, routing, degraded
orchestration, citation-backed answers over HTTP, the streaming contract,
and restart transparency.
"""

import itertools
import random
import shutil
import string
import time
from types import SimpleNamespace

import pytest
from fastapi.testclient import TestClient

from conftest import build_ingestor, make_settings, standard_source_config
from oracles import brute_force_search
from stubs import REPO_URL, VIDEO_URL, parse_sse
from marag.agents.answer import AgentRuntime
from marag.agents.types import AgentKind
from marag.agents.websearch import SearchClient
from marag.errors import AllAgentsFailed, CorruptFile, EmptyDocument
from marag.gateway.mock import MOCK_DIM, MockGateway
from marag.index.records import ChunkRecord, DocLocator, SourceKind
from marag.index.store import VectorStore
from marag.ingest.chunking import ChunkPolicy, chunk_transcript, split_text
from marag.ingest.config import SourceConfig
from marag.ingest.transcript import TranscriptSegment
from marag.orchestrator.manager import Orchestrator
from marag.orchestrator.routing import AllConfiguredPolicy
from marag.orchestrator.session import Session
from marag.service.app import create_app

QUESTION = "create a custom tool in CrewAI"


def embed_all(gateway: MockGateway, texts: list[str]):
    vectors = []
    for start in range(0, len(texts), gateway.batch_limit):
        vectors.extend(gateway.embed(texts[start : start + gateway.batch_limit]))
    return vectors


def corpus_store(count: int, label: str) -> tuple[VectorStore, MockGateway, list[str]]:
    """A store holding ``count`` distinct mock-embedded passages."""
    rng = random.Random(count * 7919 + len(label))
    gateway = MockGateway()
    texts = [
        f"{label} passage {i}: "
        + " ".join(
            "".join(rng.choice(string.ascii_lowercase) for _ in range(rng.randrange(3, 9)))
            for _ in range(rng.randrange(4, 12))
        )
        for i in range(count)
    ]
    records = [
        ChunkRecord(
            id=f"{label}-{i:04d}",
            session_id=f"sess-{label}",
            kind=SourceKind.DOCUMENTATION,
            source_url="https://docs.example.org/corpus",
            locator=DocLocator(page_url=f"https://docs.example.org/{label}/{i}"),
            text=text,
            embedding=embedding,
        )
        for i, (text, embedding) in enumerate(zip(texts, embed_all(gateway, texts)))
    ]
    store = VectorStore(MOCK_DIM)
    store.upsert(records)
    return store, gateway, texts


class TestIndexMatchesExhaustiveScan:
    """The index must return exactly what a brute-force full scan returns."""

    def test_thousand_records_hundred_queries(self):
        store, gateway, _ = corpus_store(1000, "scan")
        queries = embed_all(gateway, [f"scan query {i}" for i in range(100)])
        records = store.records()

        started = time.monotonic()
        for query in queries:
            got = store.search(query, k=10)
            want = brute_force_search(records, query.values, 10)
            assert [rec.id for rec, _ in got] == [rec.id for rec, _ in want]
            for (_, got_score), (_, want_score) in zip(got, want):
                assert got_score == pytest.approx(want_score, abs=1e-9)
        assert time.monotonic() - started < 5.0


class TestPersistenceRoundTrip:
    def test_loading_preserves_every_search_result(self, tmp_path):
        store, gateway, _ = corpus_store(100, "disk")
        path = tmp_path / "index.bin"
        store.persist(path)
        loaded = VectorStore.load(path, expected_dim=MOCK_DIM)

        for query in gateway.embed([f"disk probe {i}" for i in range(20)]):
            got = [(rec.id, score) for rec, score in loaded.search(query, k=8)]
            want = [(rec.id, score) for rec, score in store.search(query, k=8)]
            assert got == want  # float32 survives the disk round trip bit-for-bit

    def test_persisting_twice_is_byte_identical(self, tmp_path):
        store, _, _ = corpus_store(100, "disk")
        first = tmp_path / "first.bin"
        again = tmp_path / "again.bin"
        reloaded = tmp_path / "reloaded.bin"
        store.persist(first)
        store.persist(again)
        VectorStore.load(first).persist(reloaded)
        assert first.read_bytes() == again.read_bytes()
        assert first.read_bytes() == reloaded.read_bytes()

    def test_corrupted_file_is_rejected(self, tmp_path):
        store, _, _ = corpus_store(10, "disk")
        path = tmp_path / "index.bin"
        store.persist(path)
        blob = bytearray(path.read_bytes())

        for position in (len(blob) - 1, len(blob) // 2):
            mangled = bytearray(blob)
            mangled[position] ^= 0xFF
            bad = tmp_path / f"bad-{position}.bin"
            bad.write_bytes(bytes(mangled))
            with pytest.raises(CorruptFile):
                VectorStore.load(bad)


def wordy_text(rng: random.Random, length: int) -> str:
    """Random prose-like text with newlines and sentence breaks."""
    pieces = []
    size = 0
    while size < length:
        roll = rng.random()
        if roll < 0.05:
            piece = "\n\n"
        elif roll < 0.12:
            piece = "\n"
        elif roll < 0.22:
            piece = ". "
        else:
            piece = "".join(
                rng.choice(string.ascii_lowercase) for _ in range(rng.randrange(1, 12))
            ) + " "
        pieces.append(piece)
        size += len(piece)
    return "".join(pieces)[:length]


class TestChunkerReconstruction:
    """Stripping each chunk's leading overlap and concatenating must
    reproduce the input byte for byte."""

    def test_two_hundred_random_texts_round_trip(self):
        rng = random.Random(0xC4)
        policy = ChunkPolicy()
        lengths = [0, 1, policy.max_chars, policy.max_chars + 1, 20_000]
        lengths += [rng.randrange(0, 20_001) for _ in range(195)]

        for length in lengths:
            text = wordy_text(rng, length)
            if not text:
                with pytest.raises(EmptyDocument):
                    split_text(text, policy)
                continue
            spans = split_text(text, policy)
            assert all(len(span.text) <= policy.max_chars for span in spans)
            assert all(span.text == text[span.start : span.end] for span in spans)
            assert spans[0].start == 0
            assert spans[-1].end == len(text)
            for prev, span in zip(spans, spans[1:]):
                assert span.start == prev.end - policy.overlap_chars
            rebuilt = spans[0].text + "".join(
                span.text[policy.overlap_chars :] for span in spans[1:]
            )
            assert rebuilt == text

    def test_unbreakable_text_cuts_at_hard_limits(self):
        spans = split_text("x" * 3000, ChunkPolicy())
        assert [span.start for span in spans] == [0, 1300, 2600]
        assert [len(span.text) for span in spans] == [1500, 1500, 400]


class TestTranscriptWindows:
    """Every transcript segment must land in at least one chunk, and the
    chunk windows must be well-ordered timestamp ranges."""

    def random_segments(self, rng: random.Random, case: int) -> list[TranscriptSegment]:
        segments = []
        cursor = 0.0
        for i in range(rng.randrange(1, 80)):
            start = cursor + rng.random() * 5.0
            duration = 0.5 + rng.random() * 12.0
            segments.append(
                TranscriptSegment(start, start + duration, f"utterance {case}-{i}")
            )
            cursor = start + rng.random() * duration
        rng.shuffle(segments)  # arrival order must not matter
        return segments

    def test_every_segment_is_covered(self):
        rng = random.Random(0x7A)
        for case in range(50):
            segments = self.random_segments(rng, case)
            chunks = chunk_transcript(segments, ChunkPolicy())
            assert chunks
            for segment in segments:
                assert any(segment.text in text for text, _ in chunks)
            starts = [locator.start_seconds for _, locator in chunks]
            assert starts == sorted(starts)
            assert len(set(starts)) == len(starts)
            for _, locator in chunks:
                assert 0 <= locator.start_seconds < locator.end_seconds


class TestIngestionIsolation:
    """One failing source must not block the others, and a healthy re-run
    must be idempotent."""

    @staticmethod
    def indexed_triples(store):
        return sorted((rec.id, rec.source_url, rec.text) for rec in store.records())

    def test_failure_isolation_and_recovery(self, server, gateway):
        store = VectorStore(MOCK_DIM)
        ingestor = build_ingestor(server, store, gateway)
        config = standard_source_config(server)

        server.status_overrides["/yt"] = 500
        try:
            report = ingestor.ingest("sess-isolated", config)
        finally:
            server.status_overrides.pop("/yt", None)

        assert report.status == "partial"
        assert [url for url, _, _ in report.errors] == [config.youtube_url]
        kinds = {rec.kind for rec in store.records()}
        assert kinds == {SourceKind.CODE, SourceKind.DOCUMENTATION}
        assert all(rec.session_id == "sess-isolated" for rec in store.records())

        recovered = ingestor.ingest("sess-isolated", config)
        assert recovered.status == "ready"
        triples = self.indexed_triples(store)
        assert {rec.kind for rec in store.records()} == {
            SourceKind.VIDEO,
            SourceKind.CODE,
            SourceKind.DOCUMENTATION,
        }

        repeated = ingestor.ingest("sess-isolated", config)
        assert repeated.status == "ready"
        assert self.indexed_triples(store) == triples


class TestRoutingSelection:
    def ready_session(self, config: SourceConfig) -> Session:
        return Session(id="sess-route", source_config=config, ingest_state="ready")

    def test_full_config_targets_all_four_agents(self, server):
        decision = AllConfiguredPolicy().decide(
            "q", self.ready_session(standard_source_config(server))
        )
        assert set(decision.targets) == {
            AgentKind.VIDEO,
            AgentKind.CODE,
            AgentKind.DOCUMENTATION,
            AgentKind.INTERNET,
        }

    def test_docs_only_config_targets_docs_and_internet(self):
        config = SourceConfig(docs_url="https://docs.example.org/index.html")
        decision = AllConfiguredPolicy().decide("q", self.ready_session(config))
        assert set(decision.targets) == {AgentKind.DOCUMENTATION, AgentKind.INTERNET}


@pytest.fixture
def stack(server, fast_http, no_sleep):
    """Full fixture corpus ingested for one ready session, runtime wired up."""
    store = VectorStore(MOCK_DIM)
    gateway = MockGateway()
    config = standard_source_config(server)
    report = build_ingestor(server, store, gateway).ingest("sess-accept", config)
    assert report.status == "ready"
    runtime = AgentRuntime(
        store,
        gateway,
        search=SearchClient(server.base_url, settings=fast_http, sleep=no_sleep),
        settings=fast_http,
        sleep=no_sleep,
    )
    session = Session(id="sess-accept", source_config=config, ingest_state="ready")
    return SimpleNamespace(
        store=store, gateway=gateway, runtime=runtime, session=session, config=config
    )


class _HangingAgent:
    """Delegates to a real runtime but stalls one agent past any timeout."""

    def __init__(self, inner, kind: AgentKind, delay: float):
        self._inner = inner
        self._kind = kind
        self._delay = delay

    def answer(self, kind, session_id, query_text, history=()):
        if kind == self._kind:
            time.sleep(self._delay)
        return self._inner.answer(kind, session_id, query_text, history=history)


class TestDegradedOrchestration:
    """A hanging agent must cost its own report, not the response."""

    def test_hanging_agent_yields_a_degraded_answer(self, stack):
        runtime = _HangingAgent(stack.runtime, AgentKind.VIDEO, delay=3.0)
        orchestrator = Orchestrator(
            runtime, stack.gateway, agent_timeout=0.75, synthesis_timeout=30.0
        )
        response = orchestrator.orchestrate(QUESTION, stack.session)

        assert response.degraded is True
        assert response.answer_text
        reports = {report.agent: report for report in response.agent_reports}
        assert set(reports) == {
            AgentKind.VIDEO,
            AgentKind.CODE,
            AgentKind.DOCUMENTATION,
            AgentKind.INTERNET,
        }
        assert reports[AgentKind.VIDEO].status == "failed"
        assert reports[AgentKind.VIDEO].failure_reason == "timeout"
        for kind in (AgentKind.CODE, AgentKind.DOCUMENTATION, AgentKind.INTERNET):
            assert reports[kind].status == "ok"
        cited_kinds = {citation.kind for citation in response.citations}
        assert SourceKind.VIDEO not in cited_kinds
        assert SourceKind.CODE in cited_kinds
        assert len(stack.session.history) == 1

    def test_all_agents_failing_raises_and_preserves_history(self, stack, server):
        ghost = Session(
            id="sess-nothing-indexed", source_config=stack.config, ingest_state="ready"
        )
        orchestrator = Orchestrator(
            stack.runtime, stack.gateway, agent_timeout=5.0, synthesis_timeout=30.0
        )
        server.status_overrides["/search"] = 500
        try:
            with pytest.raises(AllAgentsFailed):
                orchestrator.orchestrate(QUESTION, ghost)
        finally:
            server.status_overrides.pop("/search", None)
        assert list(ghost.history) == []


def create_session(client) -> str:
    response = client.post("/sessions")
    assert response.status_code == 201
    return response.json()["id"]


def ready_session(client, server) -> str:
    session_id = create_session(client)
    response = client.put(
        f"/sessions/{session_id}/sources",
        json={
            "youtube_url": VIDEO_URL,
            "github_url": REPO_URL,
            "docs_url": server.url("/docs/index.html"),
            "github_content_types": ["code", "issue", "pull_request"],
        },
    )
    assert response.status_code == 200, response.text
    accepted = client.post(f"/sessions/{session_id}/ingest")
    assert accepted.status_code == 202, accepted.text
    job_id = accepted.json()["job_id"]
    deadline = time.monotonic() + 30.0
    while time.monotonic() < deadline:
        job = client.get(f"/ingest/{job_id}").json()
        if job["state"] in ("done", "partial", "failed"):
            assert job["state"] == "done", job
            return session_id
        time.sleep(0.02)
    raise TimeoutError("ingest never finished")


class TestEndToEndAnswer:
    """Ingest the whole fixture corpus over HTTP and ask the flagship
    question: the answer must cite every configured source kind, and every
    excerpt must come from a retrieved chunk."""

    def test_answer_cites_all_configured_sources(self, server, tmp_path, check_schema):
        started = time.monotonic()
        settings = make_settings(server, tmp_path / "data")
        with TestClient(create_app(settings)) as client:
            session_id = ready_session(client, server)
            response = client.post(
                f"/sessions/{session_id}/chat", json={"message": QUESTION}
            )
            assert response.status_code == 200, response.text
            payload = response.json()
            check_schema("chat_response", payload)

            assert payload["degraded"] is False
            cited_kinds = {citation["kind"] for citation in payload["citations"]}
            assert {"video", "code", "documentation"} <= cited_kinds

            records = {
                rec.id: rec
                for rec in client.app.state.marag.get_store(session_id).records()
            }
            for citation in payload["citations"]:
                assert citation["excerpt"]
                if citation["kind"] == "web":
                    continue  # web chunks live only for the query
                record = records[citation["chunk_id"]]
                assert citation["excerpt"] == record.text[: len(citation["excerpt"])]
                assert citation["source_url"] == record.source_url
        assert time.monotonic() - started < 30.0


class TestStreamContract:
    """Streamed events arrive as routing, agent_started*, agent_finished*,
    delta*, done — and streaming changes nothing about the answer."""

    def test_event_order_and_non_stream_equivalence(self, server, tmp_path, check_schema):
        settings = make_settings(server, tmp_path / "data")
        with TestClient(create_app(settings)) as client:
            streamed_session = ready_session(client, server)
            plain_session = ready_session(client, server)

            stream = client.post(
                f"/sessions/{streamed_session}/chat",
                json={"message": QUESTION},
                params={"stream": "true"},
            )
            assert stream.status_code == 200
            events = parse_sse(stream.text)
            for event in events:
                check_schema("chat_stream_event", event)

            names = [event["event"] for event in events]
            grouped = [name for name, _ in itertools.groupby(names)]
            assert grouped == [
                "routing",
                "agent_started",
                "agent_finished",
                "delta",
                "done",
            ]
            targets = events[0]["data"]["targets"]
            assert names.count("agent_started") == len(targets)
            assert names.count("agent_finished") == len(targets)

            done = events[-1]["data"]
            check_schema("chat_response", done)
            deltas = "".join(
                event["data"]["text"] for event in events if event["event"] == "delta"
            )
            assert deltas == done["answer_text"]

            plain = client.post(
                f"/sessions/{plain_session}/chat", json={"message": QUESTION}
            ).json()
            assert plain["answer_text"] == done["answer_text"]
            assert plain["degraded"] == done["degraded"]

            def comparable(payload):
                citations = [
                    {k: v for k, v in citation.items() if k != "chunk_id"}
                    for citation in payload["citations"]
                ]
                reports = [
                    {k: v for k, v in report.items() if k != "elapsed_ms"}
                    for report in payload["agent_reports"]
                ]
                return citations, reports

            assert comparable(plain) == comparable(done)


class TestRestartDurability:
    """A restarted service must answer exactly as the original process
    would have — same session, same history, same citations."""

    def test_restart_is_invisible(self, server, tmp_path):
        data_dir = tmp_path / "data"
        settings = make_settings(server, data_dir)
        with TestClient(create_app(settings)) as original:
            session_id = ready_session(original, server)
            first = original.post(
                f"/sessions/{session_id}/chat", json={"message": QUESTION}
            ).json()
            # freeze the on-disk state right after the first answer
            snapshot_dir = tmp_path / "snapshot"
            shutil.copytree(data_dir, snapshot_dir)
            # the answer the original process gives to the follow-up
            followup = original.post(
                f"/sessions/{session_id}/chat", json={"message": QUESTION}
            ).json()

        restarted_settings = make_settings(server, snapshot_dir)
        with TestClient(create_app(restarted_settings)) as restarted:
            session = restarted.get(f"/sessions/{session_id}")
            assert session.status_code == 200
            payload = session.json()
            assert payload["ingest_state"] == "ready"
            assert len(payload["history"]) == 1
            assert payload["history"][0]["response"] == first

            answer = restarted.post(
                f"/sessions/{session_id}/chat", json={"message": QUESTION}
            ).json()

        assert answer["answer_text"] == followup["answer_text"]
        assert answer["citations"] == followup["citations"]
        assert answer["degraded"] == followup["degraded"]
        stripped = lambda reports: [  # noqa: E731
            {k: v for k, v in report.items() if k != "elapsed_ms"}
            for report in reports
        ]
        assert stripped(answer["agent_reports"]) == stripped(followup["agent_reports"])
