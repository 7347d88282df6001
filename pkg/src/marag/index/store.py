"""In-process vector store with filtered top-k cosine search.

Search scans every record (corpora stay in the tens of thousands of chunks
per session, so exhaustive scan beats index maintenance), sorts by cosine
similarity descending, and breaks ties by insertion order so results are
deterministic. Cosine with a zero vector — query or stored — is defined as
score 0, avoiding division by zero.

Mutations are copy-on-write behind a writer lock: readers grab an immutable
snapshot and never see a partially applied upsert; any number of readers run
concurrently with at most one writer.

Persistence is a single file, little-endian throughout:

    8 bytes  magic "MARAGIDX"
    u16      format version (1)
    u32      embedding dimension
    u64      record count
    per record: u32 metadata length, UTF-8 JSON metadata, dim * f32 embedding
    u32      CRC32 of everything above

Embeddings are quantized to float32 on upsert — the precision the file
format keeps — so a persist/load round trip is observably identical.
"""

from __future__ import annotations

import json
import os
import struct
import threading
import zlib
from dataclasses import replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from marag.errors import CorruptFile, DimensionMismatch, EmptyText
from marag.index.records import ChunkRecord, EmbeddingVector, SourceKind

MAGIC = b"MARAGIDX"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<8sHIQ")
_U32 = struct.Struct("<I")


class _Snapshot:
    """Immutable view of the store: records in insertion order plus a lazily
    built float64 score matrix shared by concurrent readers."""

    __slots__ = ("records", "index_of", "_matrix", "_norms", "_lock")

    def __init__(self, records: tuple[ChunkRecord, ...]):
        self.records = records
        self.index_of = {r.id: i for i, r in enumerate(records)}
        self._matrix: Optional[np.ndarray] = None
        self._norms: Optional[np.ndarray] = None
        self._lock = threading.Lock()

    def matrix(self) -> tuple[np.ndarray, np.ndarray]:
        with self._lock:
            if self._matrix is None:
                if self.records:
                    self._matrix = np.array(
                        [r.embedding.values for r in self.records], dtype=np.float64
                    )
                    self._norms = np.linalg.norm(self._matrix, axis=1)
                else:
                    self._matrix = np.zeros((0, 1), dtype=np.float64)
                    self._norms = np.zeros(0, dtype=np.float64)
            return self._matrix, self._norms


class VectorStore:
    """Vector store for one embedding dimension. Safe to share across threads."""

    def __init__(self, dim: int, *, max_text_chars: int | None = None):
        if dim <= 0:
            raise ValueError(f"dimension must be positive, got {dim}")
        self._dim = dim
        self._max_text_chars = max_text_chars
        self._write_lock = threading.Lock()
        self._snapshot = _Snapshot(())
        self._next_seq = 0

    @property
    def dim(self) -> int:
        return self._dim

    def __len__(self) -> int:
        return len(self._snapshot.records)

    def records(self) -> tuple[ChunkRecord, ...]:
        """All records in insertion (seq) order."""
        return self._snapshot.records

    def get(self, record_id: str) -> ChunkRecord | None:
        snap = self._snapshot
        idx = snap.index_of.get(record_id)
        return snap.records[idx] if idx is not None else None

    # --- mutation ---------------------------------------------------------

    def upsert(self, records: Sequence[ChunkRecord]) -> int:
        """Insert or replace records by id. Replacement keeps the original
        insertion seq; new records get fresh, increasing seqs. All-or-nothing:
        validation happens before any mutation."""
        for rec in records:
            if rec.embedding.dim != self._dim:
                raise DimensionMismatch(
                    f"record {rec.id!r} has dim {rec.embedding.dim}, store dim is {self._dim}"
                )
            if not rec.text.strip():
                raise EmptyText(f"record {rec.id!r} has empty text")
            if self._max_text_chars is not None and len(rec.text) > self._max_text_chars:
                raise ValueError(
                    f"record {rec.id!r} text exceeds {self._max_text_chars} chars"
                )
        if not records:
            return 0
        with self._write_lock:
            current = list(self._snapshot.records)
            index_of = dict(self._snapshot.index_of)
            for rec in records:
                rec = replace(rec, embedding=rec.embedding.quantized())
                pos = index_of.get(rec.id)
                if pos is not None:
                    current[pos] = replace(rec, seq=current[pos].seq)
                else:
                    current.append(replace(rec, seq=self._next_seq))
                    self._next_seq += 1
                    index_of[rec.id] = len(current) - 1
            self._snapshot = _Snapshot(tuple(current))
        return len(records)

    def delete_by_source(self, session_id: str, source_url: str) -> int:
        with self._write_lock:
            old = self._snapshot.records
            kept = tuple(
                r for r in old if not (r.session_id == session_id and r.source_url == source_url)
            )
            removed = len(old) - len(kept)
            if removed:
                self._snapshot = _Snapshot(kept)
        return removed

    # --- search -----------------------------------------------------------

    def search(
        self,
        query: EmbeddingVector,
        k: int,
        *,
        kind: SourceKind | None = None,
        session_id: str | None = None,
    ) -> list[tuple[ChunkRecord, float]]:
        """Top-k records by cosine similarity, ties broken by lower seq.

        Scores are computed in float64 over the stored float32 values and
        clamped to [-1, 1]. A zero query or zero stored vector scores 0.
        """
        if query.dim != self._dim:
            raise DimensionMismatch(f"query dim {query.dim} != store dim {self._dim}")
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        snap = self._snapshot
        if not snap.records:
            return []

        q = np.asarray(query.quantized().values, dtype=np.float64)
        qnorm = float(np.linalg.norm(q))
        matrix, norms = snap.matrix()
        if qnorm == 0.0:
            scores = np.zeros(len(snap.records), dtype=np.float64)
        else:
            scores = matrix @ q
            denom = norms * qnorm
            nonzero = denom > 0.0
            scores = np.where(nonzero, scores / np.where(nonzero, denom, 1.0), 0.0)
            np.clip(scores, -1.0, 1.0, out=scores)

        candidates = [
            i
            for i, rec in enumerate(snap.records)
            if (kind is None or rec.kind == kind)
            and (session_id is None or rec.session_id == session_id)
        ]
        candidates.sort(key=lambda i: (-scores[i], snap.records[i].seq))
        return [(snap.records[i], float(scores[i])) for i in candidates[:k]]

    # --- persistence ------------------------------------------------------

    def persist(self, path: str | os.PathLike) -> int:
        """Write the store to ``path`` atomically. Returns bytes written.

        Serialization is deterministic: persisting an unchanged store twice
        yields byte-identical files.
        """
        snap = self._snapshot
        records = sorted(snap.records, key=lambda r: r.seq)
        parts = [_HEADER.pack(MAGIC, FORMAT_VERSION, self._dim, len(records))]
        emb = struct.Struct(f"<{self._dim}f")
        for rec in records:
            meta = json.dumps(
                rec.meta_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False
            ).encode("utf-8")
            parts.append(_U32.pack(len(meta)))
            parts.append(meta)
            parts.append(emb.pack(*rec.embedding.values))
        body = b"".join(parts)
        blob = body + _U32.pack(zlib.crc32(body))

        target = Path(path)
        tmp = target.with_name(target.name + ".tmp")
        tmp.write_bytes(blob)
        os.replace(tmp, target)
        return len(blob)

    @classmethod
    def load(
        cls,
        path: str | os.PathLike,
        *,
        expected_dim: int | None = None,
        max_text_chars: int | None = None,
    ) -> "VectorStore":
        data = Path(path).read_bytes()
        if len(data) < _HEADER.size + _U32.size:
            raise CorruptFile(f"{path}: file too short")
        magic, version, dim, count = _HEADER.unpack_from(data, 0)
        if magic != MAGIC:
            raise CorruptFile(f"{path}: bad magic")
        if version != FORMAT_VERSION:
            raise CorruptFile(f"{path}: unsupported version {version}")
        (stored_crc,) = _U32.unpack_from(data, len(data) - _U32.size)
        if zlib.crc32(data[: -_U32.size]) != stored_crc:
            raise CorruptFile(f"{path}: checksum mismatch")
        if expected_dim is not None and dim != expected_dim:
            raise DimensionMismatch(f"{path}: file dim {dim}, expected {expected_dim}")

        emb = struct.Struct(f"<{dim}f")
        offset = _HEADER.size
        end = len(data) - _U32.size
        records: list[ChunkRecord] = []
        for _ in range(count):
            if offset + _U32.size > end:
                raise CorruptFile(f"{path}: truncated record header")
            (meta_len,) = _U32.unpack_from(data, offset)
            offset += _U32.size
            if offset + meta_len + emb.size > end:
                raise CorruptFile(f"{path}: truncated record body")
            try:
                meta = json.loads(data[offset : offset + meta_len].decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise CorruptFile(f"{path}: bad record metadata: {exc}") from exc
            offset += meta_len
            values = emb.unpack_from(data, offset)
            offset += emb.size
            records.append(ChunkRecord.from_meta_dict(meta, EmbeddingVector.of(values)))
        if offset != end:
            raise CorruptFile(f"{path}: trailing bytes after records")

        store = cls(dim, max_text_chars=max_text_chars)
        store._snapshot = _Snapshot(tuple(records))
        store._next_seq = max((r.seq for r in records), default=-1) + 1
        return store
