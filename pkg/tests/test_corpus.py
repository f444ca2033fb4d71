import json
from datetime import datetime, timedelta, timezone

import pytest

from protosum.corpus import (
    ContextBatch,
    Document,
    Sentence,
    StreamConfig,
    TimeWindow,
    build_contexts_daily,
    build_contexts_refgap,
    load_corpus,
    load_references,
    parse_timestamp,
)
from protosum.errors import DataError, UsageError
from protosum.synth import SynthConfig, synth_stream, write_corpus_jsonl, write_refs_jsonl
from protosum.text import split_sentences, tokenize
from tests.util import make_doc

UTC = timezone.utc


class TestTokenize:
    def test_lowercase_and_alnum_runs(self):
        assert tokenize("Storm Talas hits!") == ["storm", "talas", "hits"]

    def test_short_tokens_dropped(self):
        assert tokenize("a I ok 7 42") == ["ok", "42"]

    def test_punctuation_splits(self):
        assert tokenize("storm-force, 9.8km") == ["storm", "force", "8km"]

    def test_empty(self):
        assert tokenize("") == []


class TestSplitSentences:
    def test_three_sentences(self):
        assert split_sentences("A. B. C.") == ["A.", "B.", "C."]

    def test_no_split_before_lowercase(self):
        assert split_sentences("E.g. this stays. Next one.") == [
            "E.g. this stays.",
            "Next one.",
        ]

    def test_question_and_bang(self):
        assert split_sentences("Really? Yes! Fine.") == ["Really?", "Yes!", "Fine."]

    def test_whitespace_only(self):
        assert split_sentences("   ") == []


class TestLoadCorpus:
    def _write(self, tmp_path, rows):
        path = tmp_path / "corpus.jsonl"
        with path.open("w") as fh:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
        return path

    def test_sorted_by_timestamp_then_id(self, tmp_path):
        rows = [
            {"doc_id": "b", "set_id": "s", "timestamp": "2021-01-01T10:00:00Z", "text": "Later."},
            {"doc_id": "a", "set_id": "s", "timestamp": "2021-01-01T09:00:00Z", "text": "Earlier."},
            {"doc_id": "c", "set_id": "s", "timestamp": "2021-01-01T09:00:00Z", "text": "Tie."},
        ]
        docs = load_corpus(self._write(tmp_path, rows))
        assert [d.doc_id for d in docs] == ["a", "c", "b"]

    def test_presplit_sentences(self, tmp_path):
        rows = [
            {
                "doc_id": "d1",
                "set_id": "s",
                "timestamp": "2021-01-01T00:00:00Z",
                "sentences": ["One.", "Two.", "Three."],
            }
        ]
        (doc,) = load_corpus(self._write(tmp_path, rows))
        assert [s.position for s in doc.sentences] == [0, 1, 2]
        assert doc.sentences[1].text == "Two."

    def test_text_is_split(self, tmp_path):
        rows = [{"doc_id": "d1", "set_id": "s", "timestamp": "2021-01-01T00:00:00Z", "text": "A. B. C."}]
        (doc,) = load_corpus(self._write(tmp_path, rows))
        assert len(doc.sentences) == 3

    def test_bad_json_names_line(self, tmp_path):
        path = tmp_path / "corpus.jsonl"
        first = json.dumps(
            {"doc_id": "a", "set_id": "s", "timestamp": "2021-01-01T00:00:00Z", "text": "X."}
        )
        path.write_text(first + "\nnot json\n")
        with pytest.raises(DataError, match="line 2"):
            load_corpus(path)

    def test_duplicate_doc_id(self, tmp_path):
        rows = [
            {"doc_id": "a", "set_id": "s", "timestamp": "2021-01-01T00:00:00Z", "text": "X."},
            {"doc_id": "a", "set_id": "s", "timestamp": "2021-01-02T00:00:00Z", "text": "Y."},
        ]
        with pytest.raises(DataError, match="duplicate"):
            load_corpus(self._write(tmp_path, rows))

    def test_missing_field(self, tmp_path):
        rows = [{"doc_id": "a", "timestamp": "2021-01-01T00:00:00Z", "text": "X."}]
        with pytest.raises(DataError, match="set_id"):
            load_corpus(self._write(tmp_path, rows))

    def test_unsupported_format(self, tmp_path):
        with pytest.raises(UsageError):
            load_corpus(tmp_path / "x.jsonl", format="csv")

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_corpus(tmp_path / "absent.jsonl")

    def test_zulu_and_offset_timestamps(self):
        z = parse_timestamp("2021-01-01T12:00:00Z")
        offset = parse_timestamp("2021-01-01T14:00:00+02:00")
        assert z == offset
        assert z.tzinfo is UTC or z.utcoffset() == timedelta(0)


class TestContextBatchInvariants:
    def test_document_outside_window_rejected(self):
        doc = make_doc("d1", "s", "2021-01-02T00:00:00Z", ["X."])
        window = TimeWindow(
            datetime(2021, 1, 1, tzinfo=UTC), datetime(2021, 1, 2, tzinfo=UTC)
        )
        with pytest.raises(DataError, match="outside"):
            ContextBatch(context_id=0, window=window, sets={"s": (doc,)})

    def test_duplicate_doc_across_sets_rejected(self):
        doc = make_doc("d1", "s", "2021-01-01T05:00:00Z", ["X."])
        window = TimeWindow(
            datetime(2021, 1, 1, tzinfo=UTC), datetime(2021, 1, 2, tzinfo=UTC)
        )
        with pytest.raises(DataError, match="more than one set"):
            ContextBatch(context_id=0, window=window, sets={"a": (doc,), "b": (doc,)})

    def test_no_sets_rejected(self):
        window = TimeWindow(
            datetime(2021, 1, 1, tzinfo=UTC), datetime(2021, 1, 2, tzinfo=UTC)
        )
        with pytest.raises(DataError):
            ContextBatch(context_id=0, window=window, sets={})


class TestDailyContexts:
    def test_empty_days_skipped_and_ids_increase(self):
        docs = [
            make_doc("d1", "s", "2019-01-01T08:00:00Z", ["X."]),
            make_doc("d2", "s", "2019-01-03T08:00:00Z", ["Y."]),
        ]
        batches = build_contexts_daily(docs, StreamConfig())
        assert [b.context_id for b in batches] == [0, 1]
        assert batches[0].window.start.day == 1
        assert batches[1].window.start.day == 3

    def test_same_day_groups_sets(self):
        docs = [
            make_doc("d1", "a", "2019-01-01T01:00:00Z", ["X."]),
            make_doc("d2", "b", "2019-01-01T02:00:00Z", ["Y."]),
            make_doc("d3", "a", "2019-01-01T03:00:00Z", ["Z."]),
        ]
        (batch,) = build_contexts_daily(docs, StreamConfig())
        assert set(batch.sets) == {"a", "b"}
        assert len(batch.sets["a"]) == 2

    def test_lifespan_filter_drops_set_entirely(self):
        docs = [make_doc(f"d{i}", "small", f"2019-01-0{i + 1}T00:00:00Z", ["X."]) for i in range(3)]
        docs += [make_doc(f"e{i}", "big", f"2019-01-0{i + 1}T00:00:00Z", ["Y."]) for i in range(4)]
        batches = build_contexts_daily(docs, StreamConfig(min_lifespan_docs=4))
        assert all("small" not in b.sets for b in batches)
        assert all("big" in b.sets for b in batches)

    def test_union_preserves_retained_docs(self):
        docs, _ = synth_stream(2, 4, 3, seed=3)
        batches = build_contexts_daily(docs, StreamConfig())
        seen = sorted(d.doc_id for b in batches for d in b.documents())
        assert seen == sorted(d.doc_id for d in docs)

    def test_empty_input(self):
        assert build_contexts_daily([], StreamConfig()) == []

    def test_ref_attachment_latest_in_window(self, tmp_path):
        docs = [make_doc("d1", "s", "2019-01-01T08:00:00Z", ["X."])]
        refs_path = tmp_path / "refs.jsonl"
        rows = [
            {"set_id": "s", "timestamp": "2019-01-01T06:00:00Z", "summary": "early"},
            {"set_id": "s", "timestamp": "2019-01-01T20:00:00Z", "summary": "late"},
            {"set_id": "s", "timestamp": "2019-01-02T00:00:00Z", "summary": "next day"},
        ]
        refs_path.write_text("".join(json.dumps(r) + "\n" for r in rows))
        refs = load_references(refs_path)
        (batch,) = build_contexts_daily(docs, StreamConfig(), refs)
        assert batch.ref_summaries == {"s": "late"}


def ref(set_id, stamp, summary="ref"):
    return {"set_id": set_id, "timestamp": stamp, "summary": summary}


def write_refs(tmp_path, rows):
    path = tmp_path / "refs.jsonl"
    path.write_text("".join(json.dumps(r) + "\n" for r in rows))
    return load_references(path)


class TestRefGapContexts:
    def test_single_gap_collects_docs(self, tmp_path):
        docs = [
            make_doc(f"d{i}", "a", f"2019-01-01T0{i}:00:00Z", ["X."]) for i in range(1, 9)
        ]
        refs = write_refs(
            tmp_path,
            [ref("a", "2019-01-01T00:30:00Z"), ref("a", "2019-01-01T09:00:00Z", "end")],
        )
        (batch,) = build_contexts_refgap(docs, refs, StreamConfig())
        assert len(batch.sets["a"]) == 8
        assert batch.ref_summaries["a"] == "end"

    def test_doc_at_gap_end_included(self, tmp_path):
        docs = [make_doc("d1", "a", "2019-01-01T09:00:00Z", ["X."])]
        refs = write_refs(
            tmp_path,
            [ref("a", "2019-01-01T00:00:00Z"), ref("a", "2019-01-01T09:00:00Z")],
        )
        (batch,) = build_contexts_refgap(docs, refs, StreamConfig())
        assert len(batch.sets["a"]) == 1

    def test_doc_at_gap_start_excluded(self, tmp_path):
        docs = [make_doc("d1", "a", "2019-01-01T00:00:00Z", ["X."])]
        refs = write_refs(
            tmp_path,
            [ref("a", "2019-01-01T00:00:00Z"), ref("a", "2019-01-01T09:00:00Z")],
        )
        assert build_contexts_refgap(docs, refs, StreamConfig()) == []

    def test_min_docs_threshold(self, tmp_path):
        docs = [
            make_doc(f"d{i}", "a", f"2019-01-01T0{i}:00:00Z", ["X."]) for i in range(1, 4)
        ]
        refs = write_refs(
            tmp_path,
            [ref("a", "2019-01-01T00:00:00Z"), ref("a", "2019-01-01T09:00:00Z")],
        )
        assert build_contexts_refgap(docs, refs, StreamConfig(min_docs_per_set=4)) == []

    def test_single_reference_contributes_nothing(self, tmp_path):
        docs = [make_doc("d1", "a", "2019-01-01T01:00:00Z", ["X."])]
        refs = write_refs(tmp_path, [ref("a", "2019-01-01T00:00:00Z")])
        assert build_contexts_refgap(docs, refs, StreamConfig()) == []

    def test_overlapping_windows_merge(self, tmp_path):
        docs = [
            make_doc("a1", "a", "2019-01-01T02:00:00Z", ["X."]),
            make_doc("b1", "b", "2019-01-01T04:00:00Z", ["Y."]),
        ]
        refs = write_refs(
            tmp_path,
            [
                ref("a", "2019-01-01T00:00:00Z"),
                ref("a", "2019-01-01T03:00:00Z", "ra"),
                ref("b", "2019-01-01T01:00:00Z"),
                ref("b", "2019-01-01T05:00:00Z", "rb"),
            ],
        )
        (batch,) = build_contexts_refgap(docs, refs, StreamConfig())
        assert set(batch.sets) == {"a", "b"}
        assert batch.ref_summaries == {"a": "ra", "b": "rb"}

    def test_disjoint_windows_stay_separate(self, tmp_path):
        docs = [
            make_doc("a1", "a", "2019-01-01T01:00:00Z", ["X."]),
            make_doc("b1", "b", "2019-01-02T01:00:00Z", ["Y."]),
        ]
        refs = write_refs(
            tmp_path,
            [
                ref("a", "2019-01-01T00:00:00Z"),
                ref("a", "2019-01-01T02:00:00Z"),
                ref("b", "2019-01-02T00:00:00Z"),
                ref("b", "2019-01-02T02:00:00Z"),
            ],
        )
        batches = build_contexts_refgap(docs, refs, StreamConfig())
        assert len(batches) == 2
        assert [b.context_id for b in batches] == [0, 1]

    def test_bridging_set_splits_same_set_gaps(self, tmp_path):
        # b's long window overlaps both of a's gaps; a must not appear twice
        # in one batch.
        docs = [
            make_doc("a1", "a", "2019-01-01T01:00:00Z", ["X."]),
            make_doc("a2", "a", "2019-01-01T05:00:00Z", ["Y."]),
            make_doc("b1", "b", "2019-01-01T03:00:00Z", ["Z."]),
        ]
        refs = write_refs(
            tmp_path,
            [
                ref("a", "2019-01-01T00:00:00Z"),
                ref("a", "2019-01-01T02:00:00Z", "a-first"),
                ref("a", "2019-01-01T06:00:00Z", "a-second"),
                ref("b", "2019-01-01T00:30:00Z"),
                ref("b", "2019-01-01T05:30:00Z", "b-ref"),
            ],
        )
        batches = build_contexts_refgap(docs, refs, StreamConfig())
        assert len(batches) == 2
        for batch in batches:
            assert len([s for s in batch.sets if s == "a"]) <= 1
        all_sets = [tuple(sorted(b.sets)) for b in batches]
        assert ("a", "b") in all_sets
        assert ("a",) in all_sets


class TestSynthStream:
    def test_deterministic(self):
        docs1, truth1 = synth_stream(3, 10, 2, seed=7)
        docs2, truth2 = synth_stream(3, 10, 2, seed=7)
        key = lambda ds: [(d.doc_id, d.timestamp, [s.text for s in d.sentences]) for d in ds]
        assert key(docs1) == key(docs2)
        assert truth1.phrases == truth2.phrases

    def test_seed_sensitivity(self):
        docs1, _ = synth_stream(2, 4, 1, seed=7)
        docs2, _ = synth_stream(2, 4, 1, seed=8)
        texts1 = [s.text for d in docs1 for s in d.sentences]
        texts2 = [s.text for d in docs2 for s in d.sentences]
        assert texts1 != texts2

    def test_planting_rate_and_isolation(self):
        docs, truth = synth_stream(3, 10, 2, seed=5)
        for (set_id, ctx), phrases in truth.phrases.items():
            ctx_docs = [
                d for d in docs if d.set_id == set_id and f"c{ctx:03d}" in d.doc_id
            ]
            for phrase in phrases:
                hits = sum(
                    1
                    for d in ctx_docs
                    if truth.contains_planted(set_id, ctx, d.tokens)
                )
                assert hits >= 0.8 * len(ctx_docs)
        # planted vocabularies are disjoint across sets
        for sid in truth.set_ids:
            others = set().union(
                *(truth.planted_tokens[o] for o in truth.set_ids if o != sid)
            )
            assert not (truth.planted_tokens[sid] & others)

    def test_explicit_theme_collision_rejected(self):
        cfg = SynthConfig(
            theme_phrases=(("storm talas",), ("storm hits",)), phrase_len=2
        )
        with pytest.raises(DataError, match="collision"):
            synth_stream(2, 3, 1, cfg, seed=0)

    def test_daily_contexts_reproduce_generation(self):
        docs, truth = synth_stream(3, 5, 4, seed=9)
        batches = build_contexts_daily(docs, StreamConfig())
        assert len(batches) == 4
        for batch in batches:
            assert set(batch.sets) == set(truth.set_ids)
            assert all(len(ds) == 5 for ds in batch.sets.values())

    def test_refgap_contexts_reproduce_generation(self, tmp_path):
        docs, truth = synth_stream(2, 5, 3, seed=9)
        corpus = tmp_path / "c.jsonl"
        refs_path = tmp_path / "r.jsonl"
        write_corpus_jsonl(corpus, docs)
        write_refs_jsonl(refs_path, truth)
        loaded = load_corpus(corpus)
        refs = load_references(refs_path)
        batches = build_contexts_refgap(loaded, refs, StreamConfig())
        assert len(batches) == 3
        for batch in batches:
            assert set(batch.sets) == set(truth.set_ids)

    def test_corpus_roundtrip_through_loader(self, tmp_path):
        docs, _ = synth_stream(2, 3, 2, seed=1)
        path = tmp_path / "c.jsonl"
        write_corpus_jsonl(path, docs)
        loaded = load_corpus(path)
        assert [d.doc_id for d in loaded] == [d.doc_id for d in docs]
        assert [d.timestamp for d in loaded] == [d.timestamp for d in docs]
        assert all(
            [s.text for s in a.sentences] == [s.text for s in b.sentences]
            for a, b in zip(loaded, docs)
        )

    def test_bad_counts(self):
        with pytest.raises(UsageError):
            synth_stream(0, 3, 1)
        with pytest.raises(UsageError):
            SynthConfig(plant_rate=0.0)
