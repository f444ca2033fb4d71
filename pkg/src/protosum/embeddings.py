"""Initial sentence representations.

The encoder consumes a matrix of per-sentence vectors for each document.
Vectors come either from a precomputed embedding file (binary or JSONL) or,
for tests and offline runs, from a deterministic hash-based embedder that
needs no pretrained model.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from .corpus import Document, Sentence
from .errors import DataError, NumericError, UsageError

MAGIC = b"EMB1"


class SentenceProvider(Protocol):
    """Anything that can produce the |d| x dim sentence matrix of a doc."""

    dim: int

    def lookup(self, doc: Document) -> np.ndarray: ...


@dataclass
class EmbeddingStore:
    """Immutable map from (doc_id, sentence position) to a fixed-dim vector."""

    dim: int
    vectors: dict[tuple[str, int], np.ndarray] = field(default_factory=dict)

    def lookup(self, doc: Document) -> np.ndarray:
        rows = []
        for sent in doc.sentences:
            key = (doc.doc_id, sent.position)
            vec = self.vectors.get(key)
            if vec is None:
                raise DataError(f"embedding ({doc.doc_id},{sent.position}) absent")
            rows.append(vec)
        return np.array(rows, dtype=np.float64)


def _check_vector(vec: np.ndarray, record_id: tuple[str, int]) -> None:
    if not np.all(np.isfinite(vec)):
        raise DataError(f"embedding ({record_id[0]},{record_id[1]}) is not finite")


def write_embedding_file(path: str | Path, store: EmbeddingStore) -> None:
    """Write the binary format: magic, u32 dim, then per-record
    [u16 id length, doc_id utf-8, u32 position, dim little-endian f32]."""
    with Path(path).open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", store.dim))
        for (doc_id, pos), vec in sorted(store.vectors.items()):
            _check_vector(vec, (doc_id, pos))
            raw = doc_id.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<I", pos))
            fh.write(np.asarray(vec, dtype="<f4").tobytes())


def _load_binary(path: Path) -> EmbeddingStore:
    data = path.read_bytes()
    if data[:4] != MAGIC:
        raise DataError(f"{path}: bad magic")
    (dim,) = struct.unpack_from("<I", data, 4)
    if dim < 1:
        raise DataError(f"{path}: dimension must be positive, got {dim}")
    vectors: dict[tuple[str, int], np.ndarray] = {}
    offset = 8
    rec_bytes = 4 * dim
    while offset < len(data):
        if offset + 2 > len(data):
            raise DataError(f"{path}: truncated record header at byte {offset}")
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + id_len + 4 + rec_bytes > len(data):
            raise DataError(f"{path}: truncated record at byte {offset}")
        doc_id = data[offset : offset + id_len].decode("utf-8")
        offset += id_len
        (pos,) = struct.unpack_from("<I", data, offset)
        offset += 4
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).astype(
            np.float64
        )
        offset += rec_bytes
        _check_vector(vec, (doc_id, pos))
        vectors[(doc_id, pos)] = vec
    return EmbeddingStore(dim=dim, vectors=vectors)


def _load_jsonl(path: Path) -> EmbeddingStore:
    vectors: dict[tuple[str, int], np.ndarray] = {}
    dim = None
    first_id: tuple[str, int] | None = None
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"{path} line {line_no}: invalid JSON: {exc}") from exc
            try:
                key = (str(record["doc_id"]), int(record["pos"]))
                vec = np.array(record["vec"], dtype=np.float64)
            except (KeyError, TypeError, ValueError) as exc:
                raise DataError(f"{path} line {line_no}: malformed record") from exc
            if dim is None:
                dim = vec.shape[0]
                first_id = key
            elif vec.shape[0] != dim:
                raise DataError(
                    f"dimension mismatch: ({first_id[0]},{first_id[1]}) has {dim} "
                    f"components but ({key[0]},{key[1]}) has {vec.shape[0]}"
                )
            _check_vector(vec, key)
            vectors[key] = vec
    if dim is None:
        raise DataError(f"{path}: no embedding records")
    return EmbeddingStore(dim=dim, vectors=vectors)


def load_embedding_file(path: str | Path) -> EmbeddingStore:
    """Load embeddings, sniffing the binary magic and falling back to JSONL."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"embedding file not found: {path}")
    with path.open("rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return _load_binary(path)
    return _load_jsonl(path)


def lookup(store: SentenceProvider, doc: Document) -> np.ndarray:
    return store.lookup(doc)


class HashEmbedder:
    """Deterministic sentence embedder for tests and offline runs.

    Each token maps to a pseudo-random unit direction seeded from
    sha256(seed:token); a sentence is the L2-normalized sum over its token
    multiset, so shared tokens pull sentences together.
    """

    def __init__(self, dim: int, seed: int = 0):
        if dim < 8:
            raise UsageError(f"hash embedder dim must be >= 8, got {dim}")
        self.dim = dim
        self.seed = seed
        self._cache: dict[str, np.ndarray] = {}

    def _direction(self, token: str) -> np.ndarray:
        cached = self._cache.get(token)
        if cached is not None:
            return cached
        digest = hashlib.sha256(f"{self.seed}:{token}".encode("utf-8")).digest()
        rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest[:8], "little")))
        vec = rng.standard_normal(self.dim)
        vec /= np.linalg.norm(vec)
        self._cache[token] = vec
        return vec

    def embed(self, sentence: Sentence) -> np.ndarray:
        tokens = sentence.tokens if sentence.tokens else ("",)
        total = np.zeros(self.dim)
        for tok in tokens:
            total += self._direction(tok)
        norm = np.linalg.norm(total)
        if norm < 1e-12:
            raise NumericError("token directions cancelled to the zero vector")
        return total / norm

    def lookup(self, doc: Document) -> np.ndarray:
        return np.array([self.embed(s) for s in doc.sentences], dtype=np.float64)
