"""Corpus data model and context construction for document-set streams.

Documents arrive timestamped and grouped into named sets (stories). A
context is the unit of summarization: either one UTC calendar day, or the
gap between two consecutive reference summaries of a set. Batches are
immutable; downstream stages must consume them in context order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import DataError, UsageError
from .text import split_sentences, tokenize

DAY = timedelta(days=1)
ONE_SECOND = timedelta(seconds=1)


@dataclass(frozen=True)
class Sentence:
    """A sentence with its cached token sequence and in-document position."""

    text: str
    tokens: tuple[str, ...]
    position: int

    @classmethod
    def make(cls, text: str, position: int) -> "Sentence":
        return cls(text=text, tokens=tuple(tokenize(text)), position=position)


@dataclass(frozen=True)
class Document:
    doc_id: str
    set_id: str
    timestamp: datetime
    sentences: tuple[Sentence, ...]

    def __post_init__(self) -> None:
        if not self.sentences:
            raise DataError(f"document {self.doc_id!r} has no sentences")
        if self.timestamp.tzinfo is None:
            raise DataError(f"document {self.doc_id!r} has a naive timestamp")

    @property
    def tokens(self) -> list[str]:
        return [t for s in self.sentences for t in s.tokens]


@dataclass(frozen=True)
class TimeWindow:
    """Half-open interval [start, end) of UTC instants."""

    start: datetime
    end: datetime

    def __contains__(self, instant: datetime) -> bool:
        return self.start <= instant < self.end

    def overlaps(self, other: "TimeWindow") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class ContextBatch:
    """All documents of one temporal context, grouped by set.

    `ref_summaries` carries the reference summary text per set when one is
    available for this context (used by the evaluation layer only).
    """

    context_id: int
    window: TimeWindow
    sets: Mapping[str, tuple[Document, ...]]
    ref_summaries: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.sets:
            raise DataError(f"context {self.context_id} has no sets")
        seen: set[str] = set()
        for set_id, docs in self.sets.items():
            if not docs:
                raise DataError(f"context {self.context_id}: set {set_id!r} is empty")
            for doc in docs:
                if doc.doc_id in seen:
                    raise DataError(
                        f"context {self.context_id}: document {doc.doc_id!r} "
                        "appears in more than one set"
                    )
                seen.add(doc.doc_id)
                if doc.timestamp not in self.window:
                    raise DataError(
                        f"context {self.context_id}: document {doc.doc_id!r} "
                        f"at {doc.timestamp.isoformat()} lies outside the window"
                    )

    @property
    def n_docs(self) -> int:
        return sum(len(d) for d in self.sets.values())

    def documents(self) -> Iterable[Document]:
        for docs in self.sets.values():
            yield from docs


@dataclass(frozen=True)
class StreamConfig:
    context_mode: str = "daily"  # "daily" | "ref-gap"
    min_docs_per_set: int = 1
    min_lifespan_docs: int = 1
    seed: int = 0

    def __post_init__(self) -> None:
        if self.context_mode not in ("daily", "ref-gap"):
            raise UsageError(f"unknown context mode {self.context_mode!r}")
        if self.min_docs_per_set < 1 or self.min_lifespan_docs < 1:
            raise UsageError("document-count thresholds must be >= 1")


@dataclass(frozen=True)
class ReferenceSummary:
    set_id: str
    timestamp: datetime
    summary: str


def parse_timestamp(raw: str) -> datetime:
    """Parse an RFC3339 timestamp into a UTC instant at second precision."""
    try:
        stamp = datetime.fromisoformat(raw.replace("Z", "+00:00"))
    except ValueError as exc:
        raise DataError(f"bad timestamp {raw!r}: {exc}") from exc
    if stamp.tzinfo is None:
        stamp = stamp.replace(tzinfo=timezone.utc)
    return stamp.astimezone(timezone.utc).replace(microsecond=0)


def _document_from_record(record: dict, line_no: int) -> Document:
    for key in ("doc_id", "set_id", "timestamp"):
        if key not in record:
            raise DataError(f"line {line_no}: missing required field {key!r}")
    if "sentences" in record:
        texts = [s.strip() for s in record["sentences"] if s and s.strip()]
    elif "text" in record:
        texts = split_sentences(record["text"])
    else:
        raise DataError(f"line {line_no}: record has neither 'text' nor 'sentences'")
    if not texts:
        raise DataError(f"line {line_no}: document {record['doc_id']!r} has no sentences")
    sentences = tuple(Sentence.make(t, i) for i, t in enumerate(texts))
    return Document(
        doc_id=str(record["doc_id"]),
        set_id=str(record["set_id"]),
        timestamp=parse_timestamp(str(record["timestamp"])),
        sentences=sentences,
    )


def load_corpus(path: str | Path, format: str = "jsonl") -> list[Document]:
    """Load a corpus file and return documents sorted by (timestamp, doc_id)."""
    if format != "jsonl":
        raise UsageError(f"unsupported corpus format {format!r}")
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus file not found: {path}")
    docs: list[Document] = []
    seen_ids: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {line_no}: invalid JSON: {exc}") from exc
            if not isinstance(record, dict):
                raise DataError(f"line {line_no}: record is not an object")
            doc = _document_from_record(record, line_no)
            if doc.doc_id in seen_ids:
                raise DataError(f"line {line_no}: duplicate doc_id {doc.doc_id!r}")
            seen_ids.add(doc.doc_id)
            docs.append(doc)
    docs.sort(key=lambda d: (d.timestamp, d.doc_id))
    return docs


def load_references(path: str | Path) -> dict[str, list[ReferenceSummary]]:
    """Load reference summaries, returned per set sorted by timestamp."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"reference file not found: {path}")
    refs: dict[str, list[ReferenceSummary]] = {}
    with path.open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DataError(f"line {line_no}: invalid JSON: {exc}") from exc
            for key in ("set_id", "timestamp", "summary"):
                if key not in record:
                    raise DataError(f"line {line_no}: missing required field {key!r}")
            ref = ReferenceSummary(
                set_id=str(record["set_id"]),
                timestamp=parse_timestamp(str(record["timestamp"])),
                summary=str(record["summary"]),
            )
            refs.setdefault(ref.set_id, []).append(ref)
    for entries in refs.values():
        entries.sort(key=lambda r: r.timestamp)
    return refs


def _day_window(instant: datetime) -> TimeWindow:
    start = instant.astimezone(timezone.utc).replace(
        hour=0, minute=0, second=0, microsecond=0
    )
    return TimeWindow(start, start + DAY)


def build_contexts_daily(
    docs: Sequence[Document],
    cfg: StreamConfig,
    refs: Mapping[str, Sequence[ReferenceSummary]] | None = None,
) -> list[ContextBatch]:
    """Group documents into one context per populated UTC calendar day.

    Sets whose lifetime document count (over the whole input) is below
    `cfg.min_lifespan_docs` are dropped entirely. When `refs` is given, each
    set in a context gets the latest reference summary timestamped inside
    the day's window, if any.
    """
    lifespan: dict[str, int] = {}
    for doc in docs:
        lifespan[doc.set_id] = lifespan.get(doc.set_id, 0) + 1
    retained = {s for s, n in lifespan.items() if n >= cfg.min_lifespan_docs}

    by_day: dict[datetime, dict[str, list[Document]]] = {}
    for doc in docs:
        if doc.set_id not in retained:
            continue
        day = _day_window(doc.timestamp).start
        by_day.setdefault(day, {}).setdefault(doc.set_id, []).append(doc)

    batches: list[ContextBatch] = []
    for context_id, day in enumerate(sorted(by_day)):
        groups = by_day[day]
        window = TimeWindow(day, day + DAY)
        sets = {sid: tuple(groups[sid]) for sid in sorted(groups)}
        ref_map: dict[str, str] = {}
        if refs:
            for sid in sets:
                in_window = [
                    r for r in refs.get(sid, ()) if r.timestamp in window
                ]
                if in_window:
                    ref_map[sid] = max(in_window, key=lambda r: r.timestamp).summary
        batches.append(
            ContextBatch(
                context_id=context_id,
                window=window,
                sets=sets,
                ref_summaries=ref_map,
            )
        )
    return batches


@dataclass
class _GapEntry:
    set_id: str
    window: TimeWindow
    docs: tuple[Document, ...]
    ref: str


def _gap_entries(
    docs: Sequence[Document],
    refs: Mapping[str, Sequence[ReferenceSummary]],
    cfg: StreamConfig,
) -> list[_GapEntry]:
    by_set: dict[str, list[Document]] = {}
    for doc in docs:
        by_set.setdefault(doc.set_id, []).append(doc)

    entries: list[_GapEntry] = []
    for set_id in sorted(refs):
        ref_list = sorted(refs[set_id], key=lambda r: r.timestamp)
        if len(ref_list) < 2:
            continue  # a single reference defines no gap
        set_docs = by_set.get(set_id, [])
        for prev, cur in zip(ref_list, ref_list[1:]):
            # Documents published in (prev, cur]; stored as the half-open
            # window [prev + 1s, cur + 1s) since instants are second-precision.
            window = TimeWindow(prev.timestamp + ONE_SECOND, cur.timestamp + ONE_SECOND)
            gap_docs = tuple(d for d in set_docs if d.timestamp in window)
            if len(gap_docs) < cfg.min_docs_per_set:
                continue
            entries.append(_GapEntry(set_id, window, gap_docs, cur.summary))
    return entries


def _merge_components(entries: list[_GapEntry]) -> list[list[_GapEntry]]:
    """Union overlapping gap windows into connected components.

    A component normally becomes one shared batch. When a component holds
    two gaps of the same set (possible when a third set's long window
    bridges them), the component is split greedily so each batch keeps at
    most one entry per set.
    """
    entries = sorted(entries, key=lambda e: (e.window.start, e.window.end, e.set_id))
    components: list[list[_GapEntry]] = []
    spans: list[TimeWindow] = []
    for entry in entries:
        merged_into = None
        for i, span in enumerate(spans):
            if span.overlaps(entry.window):
                merged_into = i
                break
        if merged_into is None:
            components.append([entry])
            spans.append(entry.window)
        else:
            components[merged_into].append(entry)
            span = spans[merged_into]
            spans[merged_into] = TimeWindow(
                min(span.start, entry.window.start), max(span.end, entry.window.end)
            )
    # Re-scan: merging may have made earlier components overlap later ones.
    changed = True
    while changed:
        changed = False
        for i in range(len(spans)):
            for j in range(i + 1, len(spans)):
                if spans[i].overlaps(spans[j]):
                    components[i].extend(components[j])
                    spans[i] = TimeWindow(
                        min(spans[i].start, spans[j].start),
                        max(spans[i].end, spans[j].end),
                    )
                    del components[j], spans[j]
                    changed = True
                    break
            if changed:
                break

    batches: list[list[_GapEntry]] = []
    for component in components:
        component.sort(key=lambda e: (e.window.start, e.window.end, e.set_id))
        groups: list[list[_GapEntry]] = []
        for entry in component:
            placed = False
            for group in groups:
                if all(g.set_id != entry.set_id for g in group):
                    group.append(entry)
                    placed = True
                    break
            if not placed:
                groups.append([entry])
        batches.extend(groups)
    return batches


def build_contexts_refgap(
    docs: Sequence[Document],
    refs: Mapping[str, Sequence[ReferenceSummary]],
    cfg: StreamConfig,
) -> list[ContextBatch]:
    """Build one context per reference gap, merging concurrent sets.

    Each consecutive reference pair of a set spans the documents published
    between them; gaps of different sets whose windows overlap are placed in
    a shared batch so those sets are concurrent. Gaps with fewer than
    `cfg.min_docs_per_set` documents are skipped.
    """
    entries = _gap_entries(docs, refs, cfg)
    if not entries:
        return []
    grouped = _merge_components(entries)
    grouped.sort(
        key=lambda g: (
            min(e.window.start for e in g),
            max(e.window.end for e in g),
            min(e.set_id for e in g),
        )
    )
    batches: list[ContextBatch] = []
    for context_id, group in enumerate(grouped):
        window = TimeWindow(
            min(e.window.start for e in group), max(e.window.end for e in group)
        )
        group = sorted(group, key=lambda e: e.set_id)
        batches.append(
            ContextBatch(
                context_id=context_id,
                window=window,
                sets={e.set_id: e.docs for e in group},
                ref_summaries={e.set_id: e.ref for e in group},
            )
        )
    return batches
