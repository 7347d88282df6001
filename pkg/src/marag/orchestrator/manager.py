"""The manager: route a query, fan out to agents, synthesize one answer.

Target agents run concurrently on a small thread pool with a shared
per-query timeout; an agent that hangs or dies becomes a failed report
while the others' results survive. Synthesis only sees successful answers
and streams its output as delta events. If every agent fails there is no
synthesis call — the stream ends with an error event instead.
"""

from __future__ import annotations

import concurrent.futures as cf
import time
from typing import Iterator, Sequence

from marag.agents.answer import CITATION_REF, AgentRuntime, DEFAULT_HISTORY_WINDOW
from marag.agents.types import AgentAnswer, AgentKind, Citation
from marag.errors import (
    AllAgentsFailed,
    GatewayTimeout,
    MaragError,
    NoEligibleAgents,
    SessionNotReady,
    error_for_code,
)
from marag.gateway.base import ChatMessage, GenerationRequest, ModelGateway
from marag.orchestrator.events import (
    AGENT_FINISHED,
    AGENT_STARTED,
    DELTA,
    DONE,
    ERROR,
    ROUTING,
    OrchestratorEvent,
)
from marag.orchestrator.routing import AllConfiguredPolicy, RoutingPolicy
from marag.orchestrator.session import Session
from marag.orchestrator.types import AgentReport, RoutingDecision, SynthesizedResponse

DEFAULT_AGENT_TIMEOUT = 30.0
DEFAULT_SYNTHESIS_TIMEOUT = 60.0
DEFAULT_PARALLELISM = 4


class Orchestrator:
    def __init__(
        self,
        runtime: AgentRuntime,
        gateway: ModelGateway,
        *,
        policy: RoutingPolicy | None = None,
        internet_enabled: bool = True,
        agent_timeout: float = DEFAULT_AGENT_TIMEOUT,
        synthesis_timeout: float = DEFAULT_SYNTHESIS_TIMEOUT,
        parallelism: int = DEFAULT_PARALLELISM,
        history_window: int = DEFAULT_HISTORY_WINDOW,
    ):
        self._runtime = runtime
        self._gateway = gateway
        self._policy = policy or AllConfiguredPolicy(internet_enabled=internet_enabled)
        self._agent_timeout = agent_timeout
        self._synthesis_timeout = synthesis_timeout
        self._parallelism = parallelism
        self._history_window = history_window

    # -- routing ---------------------------------------------------------------

    def route(self, query_text: str, session: Session) -> RoutingDecision:
        return self._policy.decide(query_text, session)

    # -- the full flow, as an event stream ---------------------------------------

    def orchestrate_events(
        self, query_text: str, session: Session
    ) -> Iterator[OrchestratorEvent]:
        """Answer one query, yielding progress events. A successful run ends
        with ``done`` (and appends to session history); a failed one ends
        with ``error`` and leaves history untouched."""
        if not query_text or not query_text.strip():
            raise ValueError("query must be non-empty")
        try:
            decision = self.route(query_text, session)
        except NoEligibleAgents as exc:
            raise SessionNotReady(str(exc)) from exc

        yield OrchestratorEvent(
            ROUTING,
            {"targets": [k.value for k in decision.targets], "policy": decision.policy_name},
        )

        history = session.history_pairs()
        answers: dict[AgentKind, AgentAnswer] = {}
        pool = cf.ThreadPoolExecutor(
            max_workers=min(self._parallelism, len(decision.targets)),
            thread_name_prefix="agent",
        )
        try:
            futures = {
                pool.submit(self._runtime.answer, kind, session.id, query_text, history): kind
                for kind in decision.targets
            }
            for kind in decision.targets:
                yield OrchestratorEvent(AGENT_STARTED, {"agent": kind.value})

            try:
                for future in cf.as_completed(futures, timeout=self._agent_timeout):
                    kind = futures[future]
                    answers[kind] = self._settle(kind, future)
                    yield self._finished_event(answers[kind])
            except cf.TimeoutError:
                pass
            for future, kind in futures.items():
                if kind not in answers:
                    future.cancel()
                    answers[kind] = AgentAnswer(
                        kind=kind,
                        answer_text="",
                        citations=[],
                        retrieved_chunk_ids=[],
                        elapsed_ms=int(self._agent_timeout * 1000),
                        status="failed",
                        failure_reason="timeout",
                    )
                    yield self._finished_event(answers[kind])
        finally:
            pool.shutdown(wait=False, cancel_futures=True)

        ordered = [answers[kind] for kind in decision.targets]
        ok_answers = [a for a in ordered if a.status == "ok"]
        reports = [
            AgentReport(a.kind, a.status, a.elapsed_ms, a.failure_reason) for a in ordered
        ]
        if not ok_answers:
            reasons = "; ".join(
                f"{a.kind.value}: {a.failure_reason}" for a in ordered if a.status == "failed"
            )
            yield OrchestratorEvent(
                ERROR,
                {"code": AllAgentsFailed.code, "message": f"all agents failed — {reasons}"},
            )
            return

        request = self._synthesis_request(query_text, ok_answers, history)
        parts: list[str] = []
        deadline = time.monotonic() + self._synthesis_timeout
        try:
            for delta in self._gateway.generate_stream(request):
                if time.monotonic() > deadline:
                    raise GatewayTimeout(
                        f"synthesis exceeded {self._synthesis_timeout:.0f} s"
                    )
                parts.append(delta)
                yield OrchestratorEvent(DELTA, {"text": delta})
        except MaragError as exc:
            yield OrchestratorEvent(ERROR, {"code": exc.code, "message": str(exc)})
            return

        answer_text = "".join(parts)
        response = SynthesizedResponse(
            answer_text=answer_text,
            citations=self._carry_citations(answer_text, ok_answers),
            agent_reports=reports,
            degraded=bool(ok_answers) and len(ok_answers) < len(ordered),
        )
        session.history.append((query_text, response))
        yield OrchestratorEvent(DONE, response.to_dict())

    def orchestrate(self, query_text: str, session: Session) -> SynthesizedResponse:
        """Non-streaming form: drain the event stream, return the final
        response, or raise the error the stream ended with."""
        for event in self.orchestrate_events(query_text, session):
            if event.name == DONE:
                return SynthesizedResponse.from_dict(event.payload)
            if event.name == ERROR:
                raise error_for_code(event.payload["code"], event.payload["message"])
        raise MaragError("event stream ended without done or error")

    # -- synthesis ----------------------------------------------------------------

    def synthesize(
        self,
        query_text: str,
        answers: Sequence[AgentAnswer],
        history: Sequence[tuple[str, str]] = (),
    ) -> SynthesizedResponse:
        """Merge successful agent answers into one cited response. Gateway
        errors propagate to the caller."""
        ok_answers = [a for a in answers if a.status == "ok"]
        if not ok_answers:
            raise ValueError("synthesize requires at least one ok answer")
        request = self._synthesis_request(query_text, ok_answers, history)
        answer_text = self._gateway.generate(request)
        return SynthesizedResponse(
            answer_text=answer_text,
            citations=self._carry_citations(answer_text, ok_answers),
            agent_reports=[
                AgentReport(a.kind, a.status, a.elapsed_ms, a.failure_reason)
                for a in ok_answers
            ],
            degraded=False,
        )

    def _synthesis_request(
        self,
        query_text: str,
        ok_answers: Sequence[AgentAnswer],
        history: Sequence[tuple[str, str]],
    ) -> GenerationRequest:
        system = ChatMessage(
            "system",
            "You are the manager of a team of specialist research agents. Merge their "
            "answers into one cohesive response. Attribute every claim by keeping its "
            "bracketed citation id, and do not add anything absent from their answers.",
        )
        messages: list[ChatMessage] = [system]
        for user_text, answer_text in list(history)[-self._history_window:]:
            messages.append(ChatMessage("user", user_text))
            messages.append(ChatMessage("assistant", answer_text))
        blocks = []
        for answer in ok_answers:
            lines = [f"== {answer.kind.value} agent ==", answer.answer_text]
            if answer.citations:
                lines.append(
                    "Citations: "
                    + " ".join(f"{c.ref} {c.source_url}" for c in answer.citations)
                )
            blocks.append("\n".join(lines))
        final = (
            "Specialist answers:\n\n"
            + "\n\n".join(blocks)
            + f"\n\nQuestion: {query_text}\n"
            + "Compose the final answer, keeping the bracketed ids of every source you use."
        )
        messages.append(ChatMessage("user", final))
        return GenerationRequest(messages=tuple(messages))

    @staticmethod
    def _carry_citations(
        answer_text: str, ok_answers: Sequence[AgentAnswer]
    ) -> list[Citation]:
        """Citations whose ids appear in the final text, ordered by first
        appearance, deduplicated by (source_url, locator)."""
        by_ref: dict[str, Citation] = {}
        for answer in ok_answers:
            for citation in answer.citations:
                by_ref.setdefault(citation.ref, citation)
        carried: list[Citation] = []
        seen_refs: set[str] = set()
        seen_locations: set[tuple] = set()
        for match in CITATION_REF.finditer(answer_text):
            ref = match.group(0)
            if ref in seen_refs:
                continue
            seen_refs.add(ref)
            citation = by_ref.get(ref)
            if citation is None:
                continue
            location = (citation.source_url, citation.locator)
            if location in seen_locations:
                continue
            seen_locations.add(location)
            carried.append(citation)
        return carried

    # -- helpers -------------------------------------------------------------------

    @staticmethod
    def _settle(kind: AgentKind, future: cf.Future) -> AgentAnswer:
        try:
            return future.result()
        except Exception as exc:  # agents shouldn't raise; this keeps the pact
            return AgentAnswer(
                kind=kind,
                answer_text="",
                citations=[],
                retrieved_chunk_ids=[],
                elapsed_ms=0,
                status="failed",
                failure_reason=f"{type(exc).__name__}: {exc}",
            )

    @staticmethod
    def _finished_event(answer: AgentAnswer) -> OrchestratorEvent:
        payload = {
            "agent": answer.kind.value,
            "status": answer.status,
            "elapsed_ms": answer.elapsed_ms,
        }
        if answer.failure_reason:
            payload["failure_reason"] = answer.failure_reason
        return OrchestratorEvent(AGENT_FINISHED, payload)
