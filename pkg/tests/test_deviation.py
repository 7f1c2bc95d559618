import math
import random

import numpy as np
import pytest

from augkit.corpus import tokenize
from augkit.deviation import (
    DISSIMILAR,
    SIMILAR,
    deviation_report,
    deviation_report_from_vectors,
    deviction,
    load_precomputed,
)
from augkit.embedding import SentenceEmbedding, sentence_embedding
from augkit.errors import HeaderMismatch, MalformedRow, NonFiniteValue, ZeroVector

from conftest import make_sentence


def emb(values):
    v = np.asarray(values, dtype=np.float64)
    return SentenceEmbedding(vector=v / np.linalg.norm(v), covered_tokens=1)


def oracle_cosine(store, stops, text_a, text_b):
    """Independent pooled-cosine path: plain Python sums over store rows."""

    def pooled(text):
        rows = []
        for tok in tokenize(text, stops).tokens:
            if tok.surface in store.vocab:
                rows.append(store.matrix[store.vocab[tok.surface]])
            elif tok.lookup_form in store.vocab:
                rows.append(store.matrix[store.vocab[tok.lookup_form]])
        if not rows:
            return None
        mean = [sum(r[d] for r in rows) / len(rows) for d in range(store.dim)]
        norm = math.sqrt(sum(x * x for x in mean))
        return [x / norm for x in mean]

    a, b = pooled(text_a), pooled(text_b)
    if a is None or b is None:
        return None
    return sum(x * y for x, y in zip(a, b))


class TestDeviction:
    def test_identical_sentences(self):
        e = emb([0.3, 0.4, 0.5])
        verdict = deviction(e, e, 0.9)
        assert verdict.similarity == pytest.approx(1.0, abs=1e-6)
        assert verdict.verdict == SIMILAR

    def test_boundary_exactly_delta_is_similar(self):
        a = emb([1.0, 0.0])
        b = SentenceEmbedding(vector=np.array([0.9, math.sqrt(1 - 0.81)]), covered_tokens=1)
        verdict = deviction(a, b, 0.9)
        assert verdict.similarity == 0.9
        assert verdict.verdict == SIMILAR

    def test_orthogonal_dissimilar(self):
        verdict = deviction(emb([1.0, 0.0]), emb([0.0, 1.0]), 0.9)
        assert verdict.similarity == pytest.approx(0.0, abs=1e-12)
        assert verdict.verdict == DISSIMILAR

    def test_symmetry(self, mini_store):
        a = sentence_embedding(mini_store, tokenize("katt hund"))
        b = sentence_embedding(mini_store, tokenize("fisk båt"))
        assert deviction(a, b, 0.5) == deviction(b, a, 0.5)

    def test_similarity_in_unit_range(self, cluster_world):
        rng = random.Random(31)
        store, stops = cluster_world["store"], cluster_world["stops"]
        for _ in range(100):
            a = sentence_embedding(store, tokenize(make_sentence(rng, [0, 1, 2], 5), stops))
            b = sentence_embedding(store, tokenize(make_sentence(rng, [3, 4, 5], 5), stops))
            sim = deviction(a, b).similarity
            assert -1.0 - 1e-6 <= sim <= 1.0 + 1e-6


class TestReport:
    def test_identical_pairs(self, mini_store):
        s = tokenize("katt hund")
        report = deviation_report([(s, s)] * 10, mini_store, 0.9)
        assert report.total_pairs == 10
        assert report.below_threshold == 0
        assert report.fraction_below == 0.0

    def test_empty_pairs(self, mini_store):
        report = deviation_report([], mini_store, 0.9)
        assert report.total_pairs == 0 and report.fraction_below == 0.0

    def test_unembeddable_counts_below_and_flagged(self, mini_store):
        pairs = [(tokenize("katt"), tokenize("ingenting alls"))]
        report = deviation_report(pairs, mini_store, 0.9)
        assert report.below_threshold == 1
        assert report.unembeddable_pairs == 1

    def test_fraction_matches_per_pair_oracle(self, cluster_world):
        rng = random.Random(37)
        store, stops = cluster_world["store"], cluster_world["stops"]
        pairs, texts = [], []
        for _ in range(200):
            a = make_sentence(rng, [0, 1, 2, 3], rng.randint(3, 8))
            if rng.random() < 0.5:
                b = a.rsplit(" ", 1)[0]  # drop last token
            else:
                b = make_sentence(rng, [2, 3, 4, 5], rng.randint(3, 8))
            pairs.append((tokenize(a, stops), tokenize(b, stops)))
            texts.append((a, b))
        delta = 0.9
        report = deviation_report(pairs, store, delta)
        expected_below = 0
        for a, b in texts:
            sim = oracle_cosine(store, stops, a, b)
            if sim is None or sim < delta:
                expected_below += 1
        assert report.total_pairs == 200
        assert report.below_threshold == expected_below
        assert report.fraction_below == pytest.approx(expected_below / 200, abs=1e-12)

    def test_monotone_in_delta(self, cluster_world):
        rng = random.Random(41)
        store, stops = cluster_world["store"], cluster_world["stops"]
        pairs = []
        for _ in range(100):
            a = make_sentence(rng, [0, 1, 2], rng.randint(3, 8))
            b = make_sentence(rng, [0, 3, 4], rng.randint(3, 8))
            pairs.append((tokenize(a, stops), tokenize(b, stops)))
        fractions = [deviation_report(pairs, store, d).fraction_below for d in (0.0, 0.5, 0.9, 0.99, 1.0)]
        assert all(x <= y for x, y in zip(fractions, fractions[1:]))


class TestPrecomputed:
    def test_load_and_report(self, tmp_path):
        p = tmp_path / "vecs.tsv"
        p.write_text("a\t1 0\nb\t0.9 0.43588989\nc\t0 1\n", encoding="utf-8")
        vectors = load_precomputed(p)
        assert set(vectors) == {"a", "b", "c"}
        assert all(abs(np.linalg.norm(v) - 1) < 1e-9 for v in vectors.values())
        report = deviation_report_from_vectors(
            [("a", "b"), ("a", "c"), ("a", "missing")], vectors, vectors, 0.9
        )
        assert report.total_pairs == 3
        assert report.below_threshold == 2  # orthogonal + missing
        assert report.unembeddable_pairs == 1

    def test_malformed(self, tmp_path):
        p = tmp_path / "vecs.tsv"
        p.write_text("solo-field\n", encoding="utf-8")
        with pytest.raises(MalformedRow):
            load_precomputed(p)

    def test_dim_mismatch(self, tmp_path):
        p = tmp_path / "vecs.tsv"
        p.write_text("a\t1 0\nb\t1 0 0\n", encoding="utf-8")
        with pytest.raises(HeaderMismatch):
            load_precomputed(p)

    def test_zero_vector(self, tmp_path):
        p = tmp_path / "vecs.tsv"
        p.write_text("a\t0 0\n", encoding="utf-8")
        with pytest.raises(ZeroVector):
            load_precomputed(p)

    def test_non_finite(self, tmp_path):
        p = tmp_path / "vecs.tsv"
        p.write_text("a\tinf 0\n", encoding="utf-8")
        with pytest.raises(NonFiniteValue):
            load_precomputed(p)
