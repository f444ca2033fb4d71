"""Centroid baselines.

Four reference methods: pick the sentences closest (by cosine) to the mean
of the context's sentence embeddings or per-document mean embeddings, with
optional incremental centers carried across contexts as exact running
means.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Document
from .embeddings import SentenceProvider
from .encoder import cosine
from .errors import DataError, UsageError
from .summarize import ScoredSentence, Summary, SummarySize

BASELINE_METHODS = ("sentcent", "doccent", "incsentcent", "incdoccent")


def method_config(name: str) -> tuple[str, bool]:
    """Map a method name to (unit mode, incremental flag)."""
    table = {
        "sentcent": ("sentence", False),
        "doccent": ("document", False),
        "incsentcent": ("sentence", True),
        "incdoccent": ("document", True),
    }
    if name not in table:
        raise UsageError(f"unknown baseline method {name!r}")
    return table[name]


@dataclass(frozen=True)
class CentroidState:
    set_id: str
    center: np.ndarray
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise DataError("centroid count must be >= 1")
        if not np.all(np.isfinite(self.center)):
            raise DataError("centroid center must be finite")


def centroid_summarize(
    set_id: str,
    context_id: int,
    docs: Sequence[Document],
    mode: str,
    incremental: bool,
    state: CentroidState | None,
    provider: SentenceProvider,
    size: SummarySize,
) -> tuple[Summary, CentroidState]:
    """Summarize one set by proximity to a centroid.

    The center is the mean of sentence embeddings ("sentence" mode) or of
    per-document mean embeddings ("document" mode) over this context. With
    `incremental`, the previous state's center merges in count-weighted, so
    the result is the exact mean over every unit seen so far. Sentences are
    ranked by cosine to the center, ties by (doc_id, position).
    """
    if mode not in ("sentence", "document"):
        raise UsageError(f"unknown centroid mode {mode!r}")
    if not docs:
        raise DataError(f"set {set_id!r}: no documents to summarize")

    doc_embs = [provider.lookup(doc) for doc in docs]
    if mode == "sentence":
        units = np.concatenate(doc_embs, axis=0)
    else:
        units = np.array([e.mean(axis=0) for e in doc_embs])
    ctx_mean = units.mean(axis=0)
    n = units.shape[0]

    if incremental and state is not None:
        total = state.count + n
        center = (state.count * state.center + n * ctx_mean) / total
        new_state = CentroidState(set_id=set_id, center=center, count=total)
    else:
        center = ctx_mean
        new_state = CentroidState(set_id=set_id, center=center, count=n)

    scored: list[ScoredSentence] = []
    for doc, embs in zip(docs, doc_embs):
        for sent in doc.sentences:
            scored.append(
                ScoredSentence(
                    doc_id=doc.doc_id,
                    position=sent.position,
                    text=sent.text,
                    tokens=sent.tokens,
                    score=cosine(embs[sent.position], center),
                    timestamp=doc.timestamp,
                )
            )
    ranked = sorted(scored, key=lambda s: (-s.score, s.doc_id, s.position))

    picked: list[ScoredSentence] = []
    if size.kind == "sentences":
        picked = list(ranked[: size.value])
    else:
        used = 0
        for sent in ranked:
            cost = len(sent.tokens)
            if used + cost <= size.value:
                picked.append(sent)
                used += cost
    summary = Summary(
        set_id=set_id,
        context_id=context_id,
        sentences=tuple(picked),
        tokens_used=sum(len(s.tokens) for s in picked),
    )
    return summary, new_state
