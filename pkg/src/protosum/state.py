"""Cross-context stream state.

Only three things survive a context: accumulated phrases per set, the
previous summary's tokens per set (novelty evaluation needs them), and the
shared encoder parameters. Documents and sentence embeddings are never
stored, which is what keeps memory flat as the stream grows.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

from .encoder import EncoderParams, params_from_bytes, params_to_bytes
from .errors import DataError
from .phrases import SetPhrases, accumulate_phrases
from .summarize import Summary

STATE_MAGIC = b"PDST"
STATE_MAJOR = 1
STATE_MINOR = 0


@dataclass(frozen=True)
class SetState:
    set_id: str
    phrases: SetPhrases
    prev_summary_tokens: tuple[str, ...]
    contexts_seen: int
    last_context_id: int

    @classmethod
    def fresh(cls, set_id: str, capacity: int) -> "SetState":
        return cls(
            set_id=set_id,
            phrases=SetPhrases.empty(set_id, capacity),
            prev_summary_tokens=(),
            contexts_seen=0,
            last_context_id=-1,
        )


def update_set_state(
    state: SetState, new_phrases: SetPhrases, summary: Summary, context_id: int
) -> SetState:
    """Advance one set past a context: merge phrases, swap in the new
    summary's tokens, bump counters. Contexts must arrive in order."""
    if context_id <= state.last_context_id:
        raise DataError(
            f"set {state.set_id!r}: context {context_id} is not after "
            f"{state.last_context_id}"
        )
    merged = accumulate_phrases(state.phrases, new_phrases, state.phrases.capacity)
    return replace(
        state,
        phrases=merged,
        prev_summary_tokens=summary.token_sequence,
        contexts_seen=state.contexts_seen + 1,
        last_context_id=context_id,
    )


@dataclass
class StreamState:
    """Everything carried between contexts, for all sets plus the shared
    encoder. `max_idle_contexts` optionally evicts sets not updated for that
    many contexts (off by default)."""

    params: EncoderParams
    phrase_capacity: int
    sets: dict[str, SetState] = field(default_factory=dict)
    contexts_processed: int = 0
    last_context_id: int = -1
    max_idle_contexts: int | None = None

    def get_set(self, set_id: str) -> SetState:
        return self.sets.get(set_id) or SetState.fresh(set_id, self.phrase_capacity)

    def apply_context(
        self,
        context_id: int,
        params: EncoderParams,
        new_phrases: Mapping[str, SetPhrases],
        summaries: Mapping[str, Summary],
    ) -> None:
        if context_id <= self.last_context_id:
            raise DataError(
                f"context {context_id} is not after {self.last_context_id}"
            )
        if set(new_phrases) != set(summaries):
            raise DataError("phrase and summary set ids differ")
        self.params = params
        for set_id in sorted(new_phrases):
            self.sets[set_id] = update_set_state(
                self.get_set(set_id), new_phrases[set_id], summaries[set_id], context_id
            )
        self.contexts_processed += 1
        self.last_context_id = context_id
        if self.max_idle_contexts is not None:
            floor = context_id - self.max_idle_contexts
            self.sets = {
                sid: st for sid, st in self.sets.items() if st.last_context_id >= floor
            }


class _Cursor:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, n: int) -> bytes:
        if self.offset + n > len(self.data):
            raise DataError("truncated state file")
        chunk = self.data[self.offset : self.offset + n]
        self.offset += n
        return chunk

    def unpack(self, fmt: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def read_str(self) -> str:
        (n,) = self.unpack("<H")
        return self.take(n).decode("utf-8")


def _pack_str(s: str) -> bytes:
    raw = s.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise DataError(f"string too long to persist ({len(raw)} bytes)")
    return struct.pack("<H", len(raw)) + raw


def save_state(path: str | Path, state: StreamState) -> None:
    parts = [
        STATE_MAGIC,
        struct.pack("<HH", STATE_MAJOR, STATE_MINOR),
        params_to_bytes(state.params),
        struct.pack(
            "<Iiiq",
            state.phrase_capacity,
            -1 if state.max_idle_contexts is None else state.max_idle_contexts,
            state.contexts_processed,
            state.last_context_id,
        ),
        struct.pack("<I", len(state.sets)),
    ]
    for set_id in sorted(state.sets):
        st = state.sets[set_id]
        parts.append(_pack_str(set_id))
        parts.append(struct.pack("<I", len(st.phrases.entries)))
        for phrase, score in st.phrases.entries:
            parts.append(_pack_str(phrase))
            parts.append(struct.pack("<d", score))
        parts.append(struct.pack("<I", len(st.prev_summary_tokens)))
        for tok in st.prev_summary_tokens:
            parts.append(_pack_str(tok))
        parts.append(struct.pack("<Iq", st.contexts_seen, st.last_context_id))
    Path(path).write_bytes(b"".join(parts))


def load_state(path: str | Path) -> StreamState:
    path = Path(path)
    if not path.exists():
        raise DataError(f"state file not found: {path}")
    data = path.read_bytes()
    if data[:4] != STATE_MAGIC:
        raise DataError(f"{path}: not a stream state file")
    major, minor = struct.unpack_from("<HH", data, 4)
    if major != STATE_MAJOR or minor > STATE_MINOR:
        raise DataError(
            f"{path}: state version {major}.{minor} incompatible with "
            f"reader {STATE_MAJOR}.{STATE_MINOR}"
        )
    params, offset = params_from_bytes(data, 8)
    cur = _Cursor(data)
    cur.offset = offset
    capacity, max_idle, processed, last_ctx = cur.unpack("<Iiiq")
    (n_sets,) = cur.unpack("<I")
    sets: dict[str, SetState] = {}
    for _ in range(n_sets):
        set_id = cur.read_str()
        (n_phrases,) = cur.unpack("<I")
        entries = []
        for _ in range(n_phrases):
            phrase = cur.read_str()
            (score,) = cur.unpack("<d")
            entries.append((phrase, score))
        (n_tokens,) = cur.unpack("<I")
        tokens = tuple(cur.read_str() for _ in range(n_tokens))
        contexts_seen, last_id = cur.unpack("<Iq")
        sets[set_id] = SetState(
            set_id=set_id,
            phrases=SetPhrases(set_id=set_id, entries=tuple(entries), capacity=capacity),
            prev_summary_tokens=tokens,
            contexts_seen=contexts_seen,
            last_context_id=last_id,
        )
    if cur.offset != len(data):
        raise DataError(f"{path}: {len(data) - cur.offset} trailing bytes")
    return StreamState(
        params=params,
        phrase_capacity=capacity,
        sets=sets,
        contexts_processed=processed,
        last_context_id=last_ctx,
        max_idle_contexts=None if max_idle < 0 else max_idle,
    )
