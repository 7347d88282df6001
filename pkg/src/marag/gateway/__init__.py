"""Uniform interface to chat-completion and embedding models."""

from marag.gateway.base import ChatMessage, GenerationRequest, ModelGateway
from marag.gateway.mock import MockGateway, mock_embedding_values
from marag.gateway.openai_http import OpenAIStyleGateway

__all__ = [
    "ChatMessage",
    "GenerationRequest",
    "MockGateway",
    "ModelGateway",
    "OpenAIStyleGateway",
    "mock_embedding_values",
]
