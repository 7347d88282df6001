"""Durable session state: one directory per session.

    {data_dir}/sessions/{id}/session.json   — config, ingest state, history
    {data_dir}/sessions/{id}/index.bin      — the session's vector index

Writes are atomic (temp file + rename) so a crash mid-write never corrupts
an existing session.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

from marag.errors import SessionNotFound, StorageError
from marag.index.store import VectorStore
from marag.orchestrator.session import Session


class SessionStorage:
    def __init__(self, data_dir: str):
        self._root = Path(data_dir) / "sessions"

    def _session_dir(self, session_id: str) -> Path:
        return self._root / session_id

    def list_ids(self) -> list[str]:
        if not self._root.is_dir():
            return []
        return sorted(p.name for p in self._root.iterdir() if (p / "session.json").is_file())

    def save_session(self, session: Session) -> None:
        directory = self._session_dir(session.id)
        try:
            directory.mkdir(parents=True, exist_ok=True)
            payload = json.dumps(session.to_dict(), indent=2)
            tmp = directory / "session.json.tmp"
            tmp.write_text(payload, encoding="utf-8")
            os.replace(tmp, directory / "session.json")
        except OSError as exc:
            raise StorageError(f"cannot persist session {session.id}: {exc}") from exc

    def load_session(self, session_id: str) -> Session:
        path = self._session_dir(session_id) / "session.json"
        if not path.is_file():
            raise SessionNotFound(f"no session {session_id!r}")
        try:
            return Session.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except (OSError, ValueError, KeyError) as exc:
            raise StorageError(f"cannot load session {session_id}: {exc}") from exc

    def save_index(self, session_id: str, store: VectorStore) -> None:
        directory = self._session_dir(session_id)
        try:
            directory.mkdir(parents=True, exist_ok=True)
            store.persist(str(directory / "index.bin"))
        except OSError as exc:
            raise StorageError(f"cannot persist index for {session_id}: {exc}") from exc

    def load_index(self, session_id: str, dim: int) -> VectorStore:
        """The session's index, or a fresh empty one when none was saved yet."""
        path = self._session_dir(session_id) / "index.bin"
        if not path.is_file():
            return VectorStore(dim)
        return VectorStore.load(str(path), expected_dim=dim)
