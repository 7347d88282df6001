"""Building agent prompts, calling the model, and parsing cited answers.

The prompt shape is fixed: a system line naming the agent's resource type,
the recent conversation turns, then one user message holding the retrieved
excerpts — each prefixed by a bracketed citation id like ``[code:2]`` —
followed by the question and an instruction to cite the ids used. The model
answer is scanned for those ids, which become structured citations.

Agents never raise: any internal failure comes back as an AgentAnswer with
status="failed" so the orchestrator can keep the healthy agents' results.
"""

from __future__ import annotations

import re
import time
from typing import Callable, Sequence

import numpy as np

from marag.errors import MaragError
from marag.gateway.base import ChatMessage, GenerationRequest, ModelGateway
from marag.httpclient import HttpSettings
from marag.index.records import ChunkRecord, Locator, SourceKind
from marag.index.store import VectorStore
from marag.ingest.chunking import ChunkPolicy, chunk_document
from marag.ingest.pipeline import chunk_id as content_chunk_id
from marag.agents.retrieval import DEFAULT_K, retrieve_context
from marag.agents.types import (
    AGENT_SOURCE_KIND,
    MAX_EXCERPT_CHARS,
    AgentAnswer,
    AgentKind,
    Citation,
)
from marag.agents.websearch import DEFAULT_RESULTS, SearchClient, web_retrieve

CITATION_REF = re.compile(r"\[(video|code|documentation|web):(\d+)\]")

DEFAULT_HISTORY_WINDOW = 6

_RESOURCE_PHRASE = {
    AgentKind.VIDEO: "the session's video transcript",
    AgentKind.CODE: "the session's code repository (files, issues, and pull requests)",
    AgentKind.DOCUMENTATION: "the session's documentation pages",
    AgentKind.INTERNET: "live web pages fetched for this question",
}


def make_ref(kind: SourceKind, index: int) -> str:
    """The bracketed citation id for the index-th excerpt (1-based)."""
    return f"[{kind.value}:{index}]"


def build_agent_messages(
    kind: AgentKind,
    excerpts: Sequence[tuple[str, str]],  # (ref, text)
    query_text: str,
    history: Sequence[tuple[str, str]],
    history_window: int = DEFAULT_HISTORY_WINDOW,
) -> tuple[ChatMessage, ...]:
    """Messages for one agent call: system line, recent turns, then the
    excerpt block + question."""
    system = ChatMessage(
        "system",
        f"You are the {kind.value} agent of a study assistant. Answer using only "
        f"{_RESOURCE_PHRASE[kind]}. Cite the bracketed id of every excerpt you draw on.",
    )
    messages: list[ChatMessage] = [system]
    for user_text, answer_text in list(history)[-history_window:]:
        messages.append(ChatMessage("user", user_text))
        messages.append(ChatMessage("assistant", answer_text))
    context_lines = [f"{ref} {text}" for ref, text in excerpts]
    final = (
        "Context excerpts:\n"
        + "\n\n".join(context_lines)
        + f"\n\nQuestion: {query_text}\n"
        + "Answer the question and cite the bracketed excerpt ids you used."
    )
    messages.append(ChatMessage("user", final))
    return tuple(messages)


def parse_citations(
    answer_text: str,
    kind: SourceKind,
    retrieved: Sequence[tuple[str, str, str, Locator, str]],
    # (chunk_id, source_url, text, locator, ref) in prompt order
) -> list[Citation]:
    """Citations for every well-formed id in the answer that points at an
    excerpt this call actually supplied. Unknown/out-of-range ids are
    dropped, duplicates collapse to the first occurrence."""
    citations: list[Citation] = []
    seen: set[str] = set()
    for match in CITATION_REF.finditer(answer_text):
        label, index_str = match.group(1), match.group(2)
        if label != kind.value:
            continue
        index = int(index_str)
        if not 1 <= index <= len(retrieved):
            continue
        ref = match.group(0)
        if ref in seen:
            continue
        seen.add(ref)
        cid, source_url, text, locator, _ = retrieved[index - 1]
        citations.append(
            Citation(
                kind=kind,
                source_url=source_url,
                locator=locator,
                excerpt=text[:MAX_EXCERPT_CHARS],
                chunk_id=cid,
                ref=ref,
            )
        )
    return citations


class AgentRuntime:
    """Shared dependencies and tunables for running any of the four agents."""

    def __init__(
        self,
        store: VectorStore,
        gateway: ModelGateway,
        *,
        search: SearchClient | None = None,
        k: int = DEFAULT_K,
        web_results: int = DEFAULT_RESULTS,
        history_window: int = DEFAULT_HISTORY_WINDOW,
        policy: ChunkPolicy = ChunkPolicy(),
        settings: HttpSettings = HttpSettings(),
        sleep: Callable[[float], None] = time.sleep,
    ):
        self._store = store
        self._gateway = gateway
        self._search = search
        self._k = k
        self._web_results = web_results
        self._history_window = history_window
        self._policy = policy
        self._settings = settings
        self._sleep = sleep

    def answer(
        self,
        kind: AgentKind,
        session_id: str,
        query_text: str,
        history: Sequence[tuple[str, str]] = (),
    ) -> AgentAnswer:
        """Run one agent end to end. Never raises — failures come back as
        status='failed' with the reason."""
        started = time.perf_counter()
        try:
            if kind == AgentKind.INTERNET:
                retrieved = self._gather_web(query_text)
            else:
                retrieved = self._gather_indexed(kind, session_id, query_text)
            messages = build_agent_messages(
                kind,
                [(ref, text) for _, _, text, _, ref in retrieved],
                query_text,
                history,
                self._history_window,
            )
            answer_text = self._gateway.generate(GenerationRequest(messages=messages))
            citations = parse_citations(answer_text, AGENT_SOURCE_KIND[kind], retrieved)
            return AgentAnswer(
                kind=kind,
                answer_text=answer_text,
                citations=citations,
                retrieved_chunk_ids=[cid for cid, _, _, _, _ in retrieved],
                elapsed_ms=self._elapsed_ms(started),
                status="ok",
            )
        except MaragError as exc:
            return self._failed(kind, started, type(exc).__name__, str(exc))
        except Exception as exc:
            return self._failed(kind, started, type(exc).__name__, str(exc))

    # -- retrieval ------------------------------------------------------------

    def _gather_indexed(
        self, kind: AgentKind, session_id: str, query_text: str
    ) -> list[tuple[str, str, str, Locator, str]]:
        source_kind = AGENT_SOURCE_KIND[kind]
        hits = retrieve_context(
            self._store, self._gateway, source_kind, session_id, query_text, self._k
        )
        return [
            (rec.id, rec.source_url, rec.text, rec.locator, make_ref(source_kind, i))
            for i, (rec, _score) in enumerate(hits, start=1)
        ]

    def _gather_web(self, query_text: str) -> list[tuple[str, str, str, Locator, str]]:
        """Fetch pages for the query, chunk them, rank chunks against the
        query embedding, keep top k. The embeddings live only inside this
        call — web content is never indexed."""
        if self._search is None:
            raise MaragError("no search provider configured")
        documents = web_retrieve(
            self._search,
            query_text,
            self._web_results,
            settings=self._settings,
            sleep=self._sleep,
        )
        chunks: list[tuple[str, Locator, str]] = []  # (text, locator, page_url)
        for doc in documents:
            for text, locator in chunk_document(doc, self._policy):
                chunks.append((text, locator, doc.page_url or doc.source_url))
        if not chunks:
            raise MaragError("no web content retrieved")

        texts = [text for text, _, _ in chunks]
        vectors = []
        limit = self._gateway.batch_limit
        for lo in range(0, len(texts), limit):
            vectors.extend(self._gateway.embed(texts[lo : lo + limit]))
        (query_vec,) = self._gateway.embed([query_text])
        q = np.asarray(query_vec.quantized().values, dtype=np.float64)
        qnorm = float(np.linalg.norm(q))
        scores: list[float] = []
        for vec in vectors:
            a = np.asarray(vec.quantized().values, dtype=np.float64)
            denom = qnorm * float(np.linalg.norm(a))
            scores.append(float(np.clip(a @ q / denom, -1.0, 1.0)) if denom else 0.0)
        order = sorted(range(len(chunks)), key=lambda i: (-scores[i], i))[: self._k]

        retrieved = []
        for rank, i in enumerate(order, start=1):
            text, locator, page_url = chunks[i]
            cid = content_chunk_id("", page_url, locator, text)
            retrieved.append((cid, page_url, text, locator, make_ref(SourceKind.WEB, rank)))
        return retrieved

    # -- helpers ---------------------------------------------------------------

    @staticmethod
    def _elapsed_ms(started: float) -> int:
        return max(0, int((time.perf_counter() - started) * 1000))

    def _failed(self, kind: AgentKind, started: float, reason: str, message: str) -> AgentAnswer:
        return AgentAnswer(
            kind=kind,
            answer_text="",
            citations=[],
            retrieved_chunk_ids=[],
            elapsed_ms=self._elapsed_ms(started),
            status="failed",
            failure_reason=f"{reason}: {message}" if message else reason,
        )
