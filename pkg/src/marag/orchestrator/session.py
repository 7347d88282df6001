"""Conversation sessions: source scope, ingest state, and chat history."""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from marag.ingest.config import SourceConfig
from marag.orchestrator.types import SynthesizedResponse

INGEST_STATES = ("empty", "running", "ready", "partial")


def new_session_id() -> str:
    return uuid.uuid4().hex[:12]


@dataclass
class Session:
    id: str
    source_config: SourceConfig = field(default_factory=SourceConfig)
    ingest_state: str = "empty"
    history: list[tuple[str, SynthesizedResponse]] = field(default_factory=list)
    created_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))

    def __post_init__(self):
        if self.ingest_state not in INGEST_STATES:
            raise ValueError(f"unknown ingest_state {self.ingest_state!r}")

    @classmethod
    def create(cls) -> "Session":
        return cls(id=new_session_id())

    def history_pairs(self) -> list[tuple[str, str]]:
        """History as (user text, answer text) pairs, the shape prompts use."""
        return [(user_text, response.answer_text) for user_text, response in self.history]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "source_config": self.source_config.to_dict(),
            "ingest_state": self.ingest_state,
            "history": [
                {"user_text": user_text, "response": response.to_dict()}
                for user_text, response in self.history
            ],
            "created_at": self.created_at.isoformat(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Session":
        return cls(
            id=data["id"],
            source_config=SourceConfig.from_dict(data["source_config"]),
            ingest_state=data["ingest_state"],
            history=[
                (item["user_text"], SynthesizedResponse.from_dict(item["response"]))
                for item in data["history"]
            ],
            created_at=datetime.fromisoformat(data["created_at"]),
        )
