"""Manager agent: routing, concurrent fan-out, synthesis, sessions."""

from marag.orchestrator.events import (
    AGENT_FINISHED,
    AGENT_STARTED,
    DELTA,
    DONE,
    ERROR,
    EVENT_NAMES,
    ROUTING,
    OrchestratorEvent,
)
from marag.orchestrator.manager import Orchestrator
from marag.orchestrator.routing import AllConfiguredPolicy, RoutingPolicy
from marag.orchestrator.session import Session, new_session_id
from marag.orchestrator.types import AgentReport, RoutingDecision, SynthesizedResponse

__all__ = [
    "AGENT_FINISHED",
    "AGENT_STARTED",
    "AllConfiguredPolicy",
    "AgentReport",
    "DELTA",
    "DONE",
    "ERROR",
    "EVENT_NAMES",
    "Orchestrator",
    "OrchestratorEvent",
    "ROUTING",
    "RoutingDecision",
    "RoutingPolicy",
    "Session",
    "SynthesizedResponse",
    "new_session_id",
]
