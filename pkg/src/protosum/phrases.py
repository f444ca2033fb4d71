"""Set-phrase ranking and accumulation.

Phrases (unigrams and bigrams) that occur often in one set and rarely in
concurrent sets get high TFIDF scores. Each set keeps a capped, accumulated
phrase list across contexts; phrase mass against that list later drives
document weighting and sentence scoring.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

from .corpus import ContextBatch, Document, Sentence
from .errors import DataError
from .stopwords import STOPWORDS

MassUnit = Union[Sentence, Document, Iterable[Document]]


@dataclass(frozen=True)
class SetPhrases:
    """Top phrases of one set: (phrase, score) pairs, descending by score."""

    set_id: str
    entries: tuple[tuple[str, float], ...]
    capacity: int

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise DataError("phrase capacity must be >= 1")
        if len(self.entries) > self.capacity:
            raise DataError(
                f"set {self.set_id!r}: {len(self.entries)} entries exceed "
                f"capacity {self.capacity}"
            )
        phrases = [p for p, _ in self.entries]
        if len(set(phrases)) != len(phrases):
            raise DataError(f"set {self.set_id!r}: duplicate phrases")
        scores = [s for _, s in self.entries]
        if any(s < 0 for s in scores):
            raise DataError(f"set {self.set_id!r}: negative phrase score")
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise DataError(f"set {self.set_id!r}: scores not descending")

    @classmethod
    def empty(cls, set_id: str, capacity: int) -> "SetPhrases":
        return cls(set_id=set_id, entries=(), capacity=capacity)

    @property
    def phrases(self) -> tuple[str, ...]:
        return tuple(p for p, _ in self.entries)

    def score_map(self) -> dict[str, float]:
        return dict(self.entries)


def _sentence_ngrams(tokens: Sequence[str]) -> Iterable[str]:
    """Unigrams and bigrams over one sentence, with the stopword rule.

    Stopword unigrams are dropped; a bigram survives only if neither of its
    tokens is a stopword.
    """
    for tok in tokens:
        if tok not in STOPWORDS:
            yield tok
    for a, b in zip(tokens, tokens[1:]):
        if a not in STOPWORDS and b not in STOPWORDS:
            yield f"{a} {b}"


def extract_candidates(doc: Document) -> Counter:
    """Candidate phrase multiset of a document (occurrence counts)."""
    counts: Counter = Counter()
    for sentence in doc.sentences:
        counts.update(_sentence_ngrams(sentence.tokens))
    return counts


def _raw_ngram_counts(unit: MassUnit) -> Counter:
    """All in-sentence unigrams/bigrams of a unit, no stopword filtering."""
    if isinstance(unit, Sentence):
        runs: Iterable[Sequence[str]] = [unit.tokens]
    elif isinstance(unit, Document):
        runs = [s.tokens for s in unit.sentences]
    else:
        runs = [s.tokens for d in unit for s in d.sentences]
    counts: Counter = Counter()
    for tokens in runs:
        counts.update(tokens)
        counts.update(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
    return counts


def phrase_mass(unit: MassUnit, phrases: SetPhrases) -> float:
    """Score-weighted phrase occurrence count of a sentence, document, or
    document group. In-sentence windows only, so document mass equals the sum
    of its sentence masses."""
    if not phrases.entries:
        return 0.0
    counts = _raw_ngram_counts(unit)
    return float(sum(score * counts[p] for p, score in phrases.entries if p in counts))


def _top_n(scored: Mapping[str, float], n: int) -> tuple[tuple[str, float], ...]:
    ordered = sorted(scored.items(), key=lambda kv: (-kv[1], kv[0]))
    return tuple(ordered[:n])


def rank_set_phrases(context: ContextBatch, n: int) -> dict[str, SetPhrases]:
    """Rank phrases per set by tf * ln(n_sets / set_frequency).

    tf counts total occurrences across the set's documents; set frequency
    counts how many sets of the context contain the phrase at all. Phrases
    appearing in every set score 0 and are dropped. A single-set context has
    no contrast signal, so scores fall back to raw tf.
    """
    set_tf: dict[str, Counter] = {}
    for set_id, docs in context.sets.items():
        counts: Counter = Counter()
        for doc in docs:
            counts.update(extract_candidates(doc))
        set_tf[set_id] = counts

    n_sets = len(set_tf)
    df: Counter = Counter()
    for counts in set_tf.values():
        df.update(counts.keys())

    out: dict[str, SetPhrases] = {}
    for set_id, counts in set_tf.items():
        if n_sets == 1:
            scored = {p: float(tf) for p, tf in counts.items()}
        else:
            scored = {}
            for p, tf in counts.items():
                idf = math.log(n_sets / df[p])
                if idf > 0.0:
                    scored[p] = tf * idf
        out[set_id] = SetPhrases(set_id=set_id, entries=_top_n(scored, n), capacity=n)
    return out


def accumulate_phrases(acc: SetPhrases, new: SetPhrases, n: int) -> SetPhrases:
    """Merge newly ranked phrases into the accumulated list by score
    summation, then re-rank and truncate to the top n."""
    if acc.set_id != new.set_id:
        raise DataError(
            f"cannot merge phrases of set {new.set_id!r} into set {acc.set_id!r}"
        )
    merged = dict(acc.entries)
    for p, score in new.entries:
        merged[p] = merged.get(p, 0.0) + score
    return SetPhrases(set_id=acc.set_id, entries=_top_n(merged, n), capacity=n)


def write_phrase_dump(
    path: str | Path, context_id: int, phrases: Mapping[str, SetPhrases]
) -> None:
    """Append one debug JSONL row per set with its current phrase list."""
    with Path(path).open("a", encoding="utf-8") as fh:
        for set_id in sorted(phrases):
            row = {
                "set_id": set_id,
                "context_id": context_id,
                "phrases": [[p, s] for p, s in phrases[set_id].entries],
            }
            fh.write(json.dumps(row) + "\n")
