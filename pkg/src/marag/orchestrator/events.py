"""Events emitted while answering one query.

The sequence for a successful run is fixed:

    routing → agent_started* → agent_finished* → delta* → done

``error`` replaces the tail when every agent fails or synthesis breaks.
The names are wire-level contract: the HTTP layer forwards them verbatim
as server-sent event names.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

ROUTING = "routing"
AGENT_STARTED = "agent_started"
AGENT_FINISHED = "agent_finished"
DELTA = "delta"
DONE = "done"
ERROR = "error"

EVENT_NAMES = (ROUTING, AGENT_STARTED, AGENT_FINISHED, DELTA, DONE, ERROR)


@dataclass(frozen=True)
class OrchestratorEvent:
    name: str
    payload: dict[str, Any]

    def __post_init__(self):
        if self.name not in EVENT_NAMES:
            raise ValueError(f"unknown event name {self.name!r}")
