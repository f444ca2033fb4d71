"""Synthetic planted-theme streams.

Desk-scale verification corpora: every set gets a disjoint vocabulary of
planted phrases (stable theme phrases plus fresh ones per context) inserted
into background noise at a known rate. The returned ground truth records
exactly what was planted where, so recovery is checkable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Document, Sentence
from .errors import DataError, UsageError
from .text import tokenize

_CONSONANTS = "bdfgklmnprstvz"
_VOWELS = "aeiou"
_SYLLABLES = [c + v for c in _CONSONANTS for v in _VOWELS]
_BASE_TIME = datetime(2021, 3, 1, tzinfo=timezone.utc)


@dataclass(frozen=True)
class SynthConfig:
    """Knobs for the generator. `theme_phrases` optionally fixes each set's
    stable phrases explicitly (one tuple per set); fresh phrases are always
    generated."""

    theme_phrases_per_set: int = 3
    fresh_phrases_per_set: int = 2
    phrase_len: int = 2
    background_vocab: int = 60
    sentences_per_doc: int = 4
    words_per_sentence: int = 7
    plant_rate: float = 0.9
    theme_phrases: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self) -> None:
        if min(
            self.theme_phrases_per_set,
            self.fresh_phrases_per_set,
            self.phrase_len,
            self.background_vocab,
            self.sentences_per_doc,
            self.words_per_sentence,
        ) < 1:
            raise UsageError("synthetic generator counts must be >= 1")
        if not 0.0 < self.plant_rate <= 1.0:
            raise UsageError(f"plant rate must be in (0, 1], got {self.plant_rate}")


@dataclass(frozen=True)
class PlantedTruth:
    """What was planted: per (set, context) active phrases and reference
    text, plus each set's full planted token vocabulary."""

    set_ids: tuple[str, ...]
    n_contexts: int
    phrases: dict[tuple[str, int], tuple[str, ...]]
    planted_tokens: dict[str, frozenset[str]]
    references: dict[tuple[str, int], str]
    ref_times: dict[tuple[str, int], datetime] = field(default_factory=dict)
    initial_ref_times: dict[str, datetime] = field(default_factory=dict)

    def contains_planted(
        self, set_id: str, context: int, text: str | Sequence[str]
    ) -> bool:
        """True if any active planted phrase of (set, context) occurs
        contiguously. Accepts raw text or an already tokenized sequence."""
        toks = tuple(tokenize(text)) if isinstance(text, str) else tuple(text)
        for phrase in self.phrases[(set_id, context)]:
            needle = tuple(phrase.split())
            span = len(needle)
            if any(toks[i : i + span] == needle for i in range(len(toks) - span + 1)):
                return True
        return False


def _word_from_index(index: int) -> str:
    base = len(_SYLLABLES)
    parts = []
    for _ in range(3):
        parts.append(_SYLLABLES[index % base])
        index //= base
    return "".join(parts)


def _sample_words(rng: np.random.Generator, count: int, taken: set[str]) -> list[str]:
    space = len(_SYLLABLES) ** 3
    picked: list[str] = []
    attempts = 0
    while len(picked) < count:
        attempts += 1
        if attempts > 20:
            raise DataError("could not sample enough distinct pseudo-words")
        draw = rng.choice(space, size=max(2 * count, 16), replace=False)
        for idx in draw:
            word = _word_from_index(int(idx))
            if word not in taken:
                taken.add(word)
                picked.append(word)
                if len(picked) == count:
                    break
    return picked


def _validate_explicit_themes(
    themes: tuple[tuple[str, ...], ...], n_sets: int
) -> list[list[str]]:
    if len(themes) != n_sets:
        raise UsageError(
            f"theme_phrases has {len(themes)} entries for {n_sets} sets"
        )
    seen_tokens: set[str] = set()
    out: list[list[str]] = []
    for set_idx, phrase_list in enumerate(themes):
        cleaned = []
        for phrase in phrase_list:
            toks = tokenize(phrase)
            if not toks:
                raise DataError(f"set {set_idx}: phrase {phrase!r} has no tokens")
            if any(t in seen_tokens for t in toks):
                raise DataError(
                    f"planted vocabulary collision: set {set_idx} phrase "
                    f"{phrase!r} reuses another set's token"
                )
            cleaned.append(" ".join(toks))
        for phrase in cleaned:
            seen_tokens.update(phrase.split())
        out.append(cleaned)
    return out


def synth_stream(
    n_sets: int,
    docs_per_set_per_context: int,
    n_contexts: int,
    vocab: SynthConfig | None = None,
    seed: int = 0,
) -> tuple[list[Document], PlantedTruth]:
    """Generate a deterministic planted-theme stream.

    Contexts map to consecutive UTC days; within a day, document timestamps
    interleave the sets second by second, so daily context building exactly
    reproduces the generation contexts. Each active phrase of a set is
    inserted contiguously into one sentence of round(plant_rate * n_docs)
    of that set's documents for the context.
    """
    if min(n_sets, docs_per_set_per_context, n_contexts) < 1:
        raise UsageError("set, document, and context counts must be >= 1")
    cfg = vocab or SynthConfig()
    rng = np.random.default_rng(seed)
    taken: set[str] = set()

    if cfg.theme_phrases is not None:
        themes = _validate_explicit_themes(cfg.theme_phrases, n_sets)
        taken.update(t for phrases in themes for p in phrases for t in p.split())
    else:
        themes = []
        for _ in range(n_sets):
            words = _sample_words(
                rng, cfg.theme_phrases_per_set * cfg.phrase_len, taken
            )
            themes.append(
                [
                    " ".join(words[i * cfg.phrase_len : (i + 1) * cfg.phrase_len])
                    for i in range(cfg.theme_phrases_per_set)
                ]
            )

    fresh: dict[tuple[int, int], list[str]] = {}
    for set_idx in range(n_sets):
        for ctx in range(n_contexts):
            words = _sample_words(rng, cfg.fresh_phrases_per_set * cfg.phrase_len, taken)
            fresh[(set_idx, ctx)] = [
                " ".join(words[i * cfg.phrase_len : (i + 1) * cfg.phrase_len])
                for i in range(cfg.fresh_phrases_per_set)
            ]

    background = _sample_words(rng, cfg.background_vocab, taken)

    set_ids = tuple(f"set{idx:02d}" for idx in range(n_sets))
    n_docs = docs_per_set_per_context
    planted_per_phrase = max(1, round(cfg.plant_rate * n_docs))

    docs: list[Document] = []
    phrases_truth: dict[tuple[str, int], tuple[str, ...]] = {}
    references: dict[tuple[str, int], str] = {}
    ref_times: dict[tuple[str, int], datetime] = {}
    planted_tokens: dict[str, set[str]] = {sid: set() for sid in set_ids}

    for ctx in range(n_contexts):
        day_start = _BASE_TIME + timedelta(days=ctx)
        for set_idx, set_id in enumerate(set_ids):
            active = tuple(themes[set_idx]) + tuple(fresh[(set_idx, ctx)])
            phrases_truth[(set_id, ctx)] = active
            references[(set_id, ctx)] = ". ".join(active) + "."
            ref_times[(set_id, ctx)] = (
                day_start + timedelta(days=1) - timedelta(seconds=1)
            )
            for phrase in active:
                planted_tokens[set_id].update(phrase.split())

            # Background sentences first, then contiguous phrase insertions.
            doc_sentences: list[list[list[str]]] = []
            for _ in range(n_docs):
                sentences = [
                    list(rng.choice(background, size=cfg.words_per_sentence))
                    for _ in range(cfg.sentences_per_doc)
                ]
                doc_sentences.append(sentences)
            for phrase in active:
                chosen = rng.choice(n_docs, size=planted_per_phrase, replace=False)
                for doc_idx in sorted(int(i) for i in chosen):
                    words = phrase.split()
                    sent_idx = int(rng.integers(cfg.sentences_per_doc))
                    sentence = doc_sentences[doc_idx][sent_idx]
                    at = int(rng.integers(len(sentence) + 1))
                    sentence[at:at] = words

            for doc_idx, sentences in enumerate(doc_sentences):
                doc_id = f"c{ctx:03d}-{set_id}-d{doc_idx:03d}"
                stamp = day_start + timedelta(
                    seconds=doc_idx * n_sets + set_idx
                )
                sents = tuple(
                    Sentence.make(" ".join(ws).capitalize() + ".", pos)
                    for pos, ws in enumerate(sentences)
                )
                docs.append(
                    Document(
                        doc_id=doc_id, set_id=set_id, timestamp=stamp, sentences=sents
                    )
                )

    docs.sort(key=lambda d: (d.timestamp, d.doc_id))
    truth = PlantedTruth(
        set_ids=set_ids,
        n_contexts=n_contexts,
        phrases=phrases_truth,
        planted_tokens={sid: frozenset(toks) for sid, toks in planted_tokens.items()},
        references=references,
        ref_times=ref_times,
        initial_ref_times={
            sid: _BASE_TIME - timedelta(seconds=1) for sid in set_ids
        },
    )
    return docs, truth


def _rfc3339(stamp: datetime) -> str:
    return stamp.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def write_corpus_jsonl(path: str | Path, docs: Sequence[Document]) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for doc in docs:
            row = {
                "doc_id": doc.doc_id,
                "set_id": doc.set_id,
                "timestamp": _rfc3339(doc.timestamp),
                "sentences": [s.text for s in doc.sentences],
            }
            fh.write(json.dumps(row) + "\n")


def write_refs_jsonl(path: str | Path, truth: PlantedTruth) -> None:
    """Reference summaries per (set, context), plus an initial boundary
    reference per set so gap-based context building covers context 0."""
    with Path(path).open("w", encoding="utf-8") as fh:
        for set_id in truth.set_ids:
            fh.write(
                json.dumps(
                    {
                        "set_id": set_id,
                        "timestamp": _rfc3339(truth.initial_ref_times[set_id]),
                        "summary": "",
                    }
                )
                + "\n"
            )
            for ctx in range(truth.n_contexts):
                fh.write(
                    json.dumps(
                        {
                            "set_id": set_id,
                            "timestamp": _rfc3339(truth.ref_times[(set_id, ctx)]),
                            "summary": truth.references[(set_id, ctx)],
                        }
                    )
                    + "\n"
                )
