"""Context retrieval for the three source-backed agents."""

from __future__ import annotations

from marag.errors import NotIngested
from marag.gateway.base import ModelGateway
from marag.index.records import ChunkRecord, SourceKind
from marag.index.store import VectorStore

DEFAULT_K = 6


def retrieve_context(
    store: VectorStore,
    gateway: ModelGateway,
    kind: SourceKind,
    session_id: str,
    query_text: str,
    k: int = DEFAULT_K,
) -> list[tuple[ChunkRecord, float]]:
    """Top-k chunks of one source kind for one session, by embedding
    similarity to the query. Raises NotIngested when the session has no
    records of that kind at all."""
    (query_vec,) = gateway.embed([query_text])
    results = store.search(query_vec, k, kind=kind, session_id=session_id)
    if not results:
        raise NotIngested(f"session {session_id} has no {kind.value} chunks")
    return results
