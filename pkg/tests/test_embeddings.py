import json

import numpy as np
import pytest

from protosum.corpus import Sentence
from protosum.embeddings import (
    EmbeddingStore,
    HashEmbedder,
    load_embedding_file,
    write_embedding_file,
)
from protosum.errors import DataError, UsageError
from protosum.synth import synth_stream
from tests.util import make_doc


def random_store(rng, n_records=3, dim=4):
    """Store whose values are exactly f32-representable."""
    vectors = {}
    for i in range(n_records):
        vec = rng.standard_normal(dim).astype(np.float32).astype(np.float64)
        vectors[(f"doc{i}", i % 2)] = vec
    return EmbeddingStore(dim=dim, vectors=vectors)


class TestBinaryFormat:
    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        store = random_store(rng, n_records=5, dim=7)
        path = tmp_path / "emb.bin"
        write_embedding_file(path, store)
        loaded = load_embedding_file(path)
        assert loaded.dim == store.dim
        assert set(loaded.vectors) == set(store.vectors)
        for key, vec in store.vectors.items():
            np.testing.assert_array_equal(loaded.vectors[key], vec)

    def test_write_load_write_stable(self, tmp_path):
        rng = np.random.default_rng(1)
        store = random_store(rng)
        p1, p2 = tmp_path / "a.bin", tmp_path / "b.bin"
        write_embedding_file(p1, store)
        write_embedding_file(p2, load_embedding_file(p1))
        assert p1.read_bytes() == p2.read_bytes()

    def test_record_count(self, tmp_path):
        store = random_store(np.random.default_rng(2), n_records=3, dim=4)
        path = tmp_path / "emb.bin"
        write_embedding_file(path, store)
        assert len(load_embedding_file(path).vectors) == 3

    def test_truncated_rejected(self, tmp_path):
        store = random_store(np.random.default_rng(3))
        path = tmp_path / "emb.bin"
        write_embedding_file(path, store)
        (tmp_path / "cut.bin").write_bytes(path.read_bytes()[:-3])
        with pytest.raises(DataError, match="truncated"):
            load_embedding_file(tmp_path / "cut.bin")

    def test_nan_rejected_on_write(self, tmp_path):
        store = EmbeddingStore(dim=2, vectors={("d", 0): np.array([np.nan, 1.0])})
        with pytest.raises(DataError, match="finite"):
            write_embedding_file(tmp_path / "emb.bin", store)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="not found"):
            load_embedding_file(tmp_path / "absent.bin")


class TestJsonlFallback:
    def _write(self, tmp_path, rows):
        path = tmp_path / "emb.jsonl"
        path.write_text("".join(json.dumps(r) + "\n" for r in rows))
        return path

    def test_loads(self, tmp_path):
        rows = [
            {"doc_id": "a", "pos": 0, "vec": [1.0, 2.0]},
            {"doc_id": "a", "pos": 1, "vec": [3.0, 4.0]},
        ]
        store = load_embedding_file(self._write(tmp_path, rows))
        assert store.dim == 2
        np.testing.assert_array_equal(store.vectors[("a", 1)], [3.0, 4.0])

    def test_dimension_mismatch_names_both_records(self, tmp_path):
        rows = [
            {"doc_id": "a", "pos": 0, "vec": [1.0, 2.0, 3.0]},
            {"doc_id": "b", "pos": 1, "vec": [1.0, 2.0, 3.0, 4.0]},
        ]
        with pytest.raises(DataError) as err:
            load_embedding_file(self._write(tmp_path, rows))
        assert "(a,0)" in str(err.value) and "(b,1)" in str(err.value)

    def test_nan_component_rejected(self, tmp_path):
        rows = [{"doc_id": "a", "pos": 0, "vec": [1.0, float("nan")]}]
        with pytest.raises(DataError, match="finite"):
            load_embedding_file(self._write(tmp_path, rows))

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "emb.jsonl"
        path.write_text("\n")
        with pytest.raises(DataError, match="no embedding records"):
            load_embedding_file(path)


class TestLookup:
    def test_rows_in_position_order(self):
        doc = make_doc("docA", "s", "2021-01-01T00:00:00Z", ["One.", "Two."])
        store = EmbeddingStore(
            dim=2,
            vectors={("docA", 0): np.array([1.0, 0.0]), ("docA", 1): np.array([0.0, 1.0])},
        )
        mat = store.lookup(doc)
        assert mat.shape == (2, 2)
        np.testing.assert_array_equal(mat[0], [1.0, 0.0])
        np.testing.assert_array_equal(mat[1], [0.0, 1.0])

    def test_missing_position_named(self):
        doc = make_doc("docA", "s", "2021-01-01T00:00:00Z", ["One.", "Two."])
        store = EmbeddingStore(dim=2, vectors={("docA", 0): np.array([1.0, 0.0])})
        with pytest.raises(DataError, match=r"\(docA,1\) absent"):
            store.lookup(doc)

    def test_pure(self):
        doc = make_doc("docA", "s", "2021-01-01T00:00:00Z", ["One."])
        store = EmbeddingStore(dim=1, vectors={("docA", 0): np.array([2.0])})
        np.testing.assert_array_equal(store.lookup(doc), store.lookup(doc))


class TestHashEmbedder:
    def test_deterministic(self):
        emb = HashEmbedder(16, seed=3)
        s = Sentence.make("Storm talas hits land.", 0)
        np.testing.assert_array_equal(emb.embed(s), emb.embed(s))
        fresh = HashEmbedder(16, seed=3)
        np.testing.assert_array_equal(emb.embed(s), fresh.embed(s))

    def test_unit_norm(self):
        emb = HashEmbedder(32, seed=0)
        rng = np.random.default_rng(4)
        for _ in range(20):
            words = [f"w{rng.integers(100)}" for _ in range(rng.integers(1, 9))]
            s = Sentence.make(" ".join(words) + ".", 0)
            assert abs(np.linalg.norm(emb.embed(s)) - 1.0) < 1e-6

    def test_dim_floor(self):
        with pytest.raises(UsageError):
            HashEmbedder(7)

    def test_empty_sentence_fallback(self):
        emb = HashEmbedder(8, seed=1)
        empty = Sentence.make("!", 0)
        vec = emb.embed(empty)
        assert abs(np.linalg.norm(vec) - 1.0) < 1e-6
        np.testing.assert_array_equal(vec, emb.embed(Sentence.make("?", 1)))

    def test_seed_changes_vectors(self):
        s = Sentence.make("Storm talas.", 0)
        v1 = HashEmbedder(16, seed=0).embed(s)
        v2 = HashEmbedder(16, seed=1).embed(s)
        assert not np.allclose(v1, v2)

    def test_lookup_matrix(self):
        emb = HashEmbedder(8, seed=0)
        doc = make_doc("d", "s", "2021-01-01T00:00:00Z", ["One two.", "Three four."])
        mat = emb.lookup(doc)
        assert mat.shape == (2, 8)
        np.testing.assert_array_equal(mat[1], emb.embed(doc.sentences[1]))

    def test_same_topic_pairs_closer_than_cross_topic(self):
        """Shared planted tokens should pull same-set sentences together on
        average; Monte-Carlo over a fixed synthetic corpus."""
        docs, _ = synth_stream(3, 8, 2, seed=12)
        emb = HashEmbedder(48, seed=12)
        by_set = {}
        for doc in docs:
            by_set.setdefault(doc.set_id, []).extend(
                emb.embed(s) for s in doc.sentences
            )
        rng = np.random.default_rng(12)
        set_ids = sorted(by_set)
        same, cross = [], []
        for _ in range(1000):
            sid = set_ids[rng.integers(len(set_ids))]
            a, b = rng.integers(len(by_set[sid]), size=2)
            same.append(float(by_set[sid][a] @ by_set[sid][b]))
            s1, s2 = rng.choice(len(set_ids), size=2, replace=False)
            i = rng.integers(len(by_set[set_ids[s1]]))
            j = rng.integers(len(by_set[set_ids[s2]]))
            cross.append(float(by_set[set_ids[s1]][i] @ by_set[set_ids[s2]][j]))
        assert np.mean(same) > np.mean(cross)
