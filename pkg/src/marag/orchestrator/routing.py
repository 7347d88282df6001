"""Routing policies: which agents see a given query.

The shipped policy fans out to every agent whose source is configured and
ingested, plus the internet agent — mirroring the static delegation shown
by the system's working flow. Smarter (query-aware) routing slots in by
implementing the same one-method interface.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol, runtime_checkable

from marag.agents.types import AgentKind
from marag.errors import NoEligibleAgents
from marag.orchestrator.session import Session
from marag.orchestrator.types import RoutingDecision


@runtime_checkable
class RoutingPolicy(Protocol):
    name: str

    def decide(self, query_text: str, session: Session) -> RoutingDecision:
        """Pick target agents for this query. Raises NoEligibleAgents when
        nothing can run."""
        ...


@dataclass(frozen=True)
class AllConfiguredPolicy:
    """Route to every source-backed agent with ingested content, plus the
    internet agent (unless disabled), in the fixed order
    video → code → documentation → internet."""

    internet_enabled: bool = True
    name: str = "all-configured"

    def decide(self, query_text: str, session: Session) -> RoutingDecision:
        targets: list[AgentKind] = []
        if session.ingest_state in ("ready", "partial"):
            config = session.source_config
            if config.youtube_url:
                targets.append(AgentKind.VIDEO)
            if config.github_url:
                targets.append(AgentKind.CODE)
            if config.docs_url:
                targets.append(AgentKind.DOCUMENTATION)
        if self.internet_enabled:
            targets.append(AgentKind.INTERNET)
        if not targets:
            raise NoEligibleAgents(
                f"session {session.id}: no sources ingested and internet agent disabled"
            )
        return RoutingDecision(targets=tuple(targets), policy_name=self.name)
