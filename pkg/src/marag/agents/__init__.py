"""The four specialized agents: video, code, documentation, internet."""

from marag.agents.answer import AgentRuntime
from marag.agents.retrieval import retrieve_context
from marag.agents.types import AgentAnswer, AgentKind, Citation, WebSearchResult
from marag.agents.websearch import SearchClient, web_retrieve

__all__ = [
    "AgentAnswer",
    "AgentKind",
    "AgentRuntime",
    "Citation",
    "SearchClient",
    "WebSearchResult",
    "retrieve_context",
    "web_retrieve",
]
