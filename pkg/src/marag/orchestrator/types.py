"""Manager-level data types: routing decisions and synthesized responses."""

from __future__ import annotations

from dataclasses import dataclass, field

from marag.agents.types import AgentKind, Citation

AGENT_ORDER = (AgentKind.VIDEO, AgentKind.CODE, AgentKind.DOCUMENTATION, AgentKind.INTERNET)


@dataclass(frozen=True)
class RoutingDecision:
    """Which agents handle a query, in dispatch order."""

    targets: tuple[AgentKind, ...]
    policy_name: str

    def __post_init__(self):
        if not self.targets:
            raise ValueError("routing must target at least one agent")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError("routing targets must be unique")


@dataclass(frozen=True)
class AgentReport:
    """Per-agent outcome attached to a synthesized response."""

    agent: AgentKind
    status: str  # "ok" | "failed"
    elapsed_ms: int
    failure_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "agent": self.agent.value,
            "status": self.status,
            "elapsed_ms": self.elapsed_ms,
            "failure_reason": self.failure_reason,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "AgentReport":
        return cls(
            agent=AgentKind(data["agent"]),
            status=data["status"],
            elapsed_ms=int(data["elapsed_ms"]),
            failure_reason=data.get("failure_reason"),
        )


@dataclass
class SynthesizedResponse:
    """The manager's final answer: one text, deduplicated citations, and a
    report line per agent that ran. ``degraded`` means at least one agent
    failed while at least one succeeded."""

    answer_text: str
    citations: list[Citation]
    agent_reports: list[AgentReport]
    degraded: bool

    def __post_init__(self):
        ok = sum(1 for r in self.agent_reports if r.status == "ok")
        failed = sum(1 for r in self.agent_reports if r.status == "failed")
        expected = failed >= 1 and ok >= 1
        if self.degraded != expected:
            raise ValueError(
                f"degraded={self.degraded} inconsistent with {ok} ok / {failed} failed agents"
            )

    def to_dict(self) -> dict:
        return {
            "answer_text": self.answer_text,
            "citations": [c.to_dict() for c in self.citations],
            "agent_reports": [r.to_dict() for r in self.agent_reports],
            "degraded": self.degraded,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SynthesizedResponse":
        return cls(
            answer_text=data["answer_text"],
            citations=[Citation.from_dict(c) for c in data["citations"]],
            agent_reports=[AgentReport.from_dict(r) for r in data["agent_reports"]],
            degraded=bool(data["degraded"]),
        )
