"""Sentence scoring and summary selection.

Every sentence gets a three-factor score: how well its document aligns with
the set's prototypes, how much attention the document pooling gave the
sentence, and how much of the document's phrase mass it carries. The top
sentences form the set's summary for the context.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Document, Sentence
from .encoder import SetPrototype, cosine
from .errors import DataError, UsageError
from .phrases import SetPhrases, phrase_mass


@dataclass(frozen=True)
class SummarySize:
    """Either a fixed sentence count or a token budget."""

    kind: str  # "sentences" | "tokens"
    value: int

    def __post_init__(self) -> None:
        if self.kind not in ("sentences", "tokens"):
            raise UsageError(f"unknown summary size kind {self.kind!r}")
        if self.value < 1:
            raise UsageError("summary size must be >= 1")

    @classmethod
    def sentences(cls, k: int) -> "SummarySize":
        return cls("sentences", k)

    @classmethod
    def tokens(cls, budget: int) -> "SummarySize":
        return cls("tokens", budget)


@dataclass(frozen=True)
class ScoredSentence:
    doc_id: str
    position: int
    text: str
    tokens: tuple[str, ...]
    score: float
    timestamp: datetime


@dataclass(frozen=True)
class Summary:
    set_id: str
    context_id: int
    sentences: tuple[ScoredSentence, ...]
    tokens_used: int

    @property
    def token_sequence(self) -> tuple[str, ...]:
        return tuple(t for s in self.sentences for t in s.tokens)


def _mass_ratio(
    sentence: Sentence, doc: Document, phrases: SetPhrases
) -> float:
    doc_mass = phrase_mass(doc, phrases)
    if doc_mass <= 0.0:
        return 1.0 / len(doc.sentences)
    return phrase_mass(sentence, phrases) / doc_mass


def score_sentence(
    sentence: Sentence,
    doc: Document,
    cd: np.ndarray,
    alpha_k: float,
    r: np.ndarray,
    r_new: np.ndarray,
    acc_phrases: SetPhrases,
    new_phrases: SetPhrases,
    gamma: float,
) -> float:
    """F = f_d * f_s * f_p.

    f_d blends exp-cosine alignment of the document vector with the
    accumulated and new prototypes; f_s is the sentence's pooling weight;
    f_p blends the sentence's share of its document's phrase mass under each
    phrase list, falling back to a uniform 1/|d| share when a document has
    zero mass. Prototype terms with zero blend weight are never evaluated,
    so gamma = 1 ignores the new prototype entirely and gamma = 0 the
    accumulated one.
    """
    if not 0.0 <= gamma <= 1.0:
        raise UsageError(f"distillation ratio must be in [0, 1], got {gamma}")
    f_d = 0.0
    if gamma > 0.0:
        f_d += gamma * math.exp(cosine(cd, r))
    if gamma < 1.0:
        f_d += (1.0 - gamma) * math.exp(cosine(cd, r_new))

    f_s = float(alpha_k)

    f_p = 0.0
    if gamma > 0.0:
        f_p += gamma * _mass_ratio(sentence, doc, acc_phrases)
    if gamma < 1.0:
        f_p += (1.0 - gamma) * _mass_ratio(sentence, doc, new_phrases)

    return f_d * f_s * f_p


def score_set(
    docs: Sequence[Document],
    cds: Sequence[np.ndarray],
    alphas: Sequence[np.ndarray],
    proto: SetPrototype,
    acc_phrases: SetPhrases,
    new_phrases: SetPhrases,
    gamma: float,
) -> list[ScoredSentence]:
    """Score every sentence of every document in a set."""
    if not (len(docs) == len(cds) == len(alphas)):
        raise DataError("docs, document vectors, and weights must align")
    scored: list[ScoredSentence] = []
    for doc, cd, alpha in zip(docs, cds, alphas):
        for sent in doc.sentences:
            f = score_sentence(
                sent,
                doc,
                cd,
                float(alpha[sent.position]),
                proto.accumulated,
                proto.new,
                acc_phrases,
                new_phrases,
                gamma,
            )
            scored.append(
                ScoredSentence(
                    doc_id=doc.doc_id,
                    position=sent.position,
                    text=sent.text,
                    tokens=sent.tokens,
                    score=f,
                    timestamp=doc.timestamp,
                )
            )
    return scored


def select_summary(
    scored: Sequence[ScoredSentence],
    size: SummarySize,
    set_id: str,
    context_id: int,
) -> Summary:
    """Pick the top sentences by score.

    Ties break deterministically by (earlier document timestamp, lower
    doc_id, lower position). Sentence-count mode takes the top k; token
    budget mode greedily adds sentences in score order, skipping any that
    would overflow the budget.
    """
    if not scored:
        raise DataError(f"set {set_id!r}: no sentences to summarize")
    ranked = sorted(
        scored, key=lambda s: (-s.score, s.timestamp, s.doc_id, s.position)
    )
    picked: list[ScoredSentence] = []
    if size.kind == "sentences":
        picked = list(ranked[: size.value])
    else:
        used = 0
        for sent in ranked:
            n = len(sent.tokens)
            if used + n <= size.value:
                picked.append(sent)
                used += n
    return Summary(
        set_id=set_id,
        context_id=context_id,
        sentences=tuple(picked),
        tokens_used=sum(len(s.tokens) for s in picked),
    )


def summary_row(summary: Summary, gamma: float | None, method: str | None = None) -> dict:
    row: dict = {
        "set_id": summary.set_id,
        "context_id": summary.context_id,
        "sentences": [
            {"doc_id": s.doc_id, "pos": s.position, "text": s.text, "score": s.score}
            for s in summary.sentences
        ],
    }
    if method is None:
        row["gamma"] = gamma
    else:
        row["method"] = method
    return row


def write_summaries(
    path: str | Path,
    summaries: Sequence[Summary],
    gamma: float | None,
    method: str | None = None,
) -> None:
    """Append one JSONL row per summary."""
    with Path(path).open("a", encoding="utf-8") as fh:
        for summary in summaries:
            fh.write(json.dumps(summary_row(summary, gamma, method)) + "\n")
