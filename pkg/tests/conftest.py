"""Shared fixtures: the tiny checked-in embedding file and synthetic
cluster-structured corpora used by the heavier suites."""

from __future__ import annotations

import random
from pathlib import Path

import numpy as np
import pytest

from augkit.corpus import LabeledRecord, load_stopwords
from augkit.embedding import EmbeddingStore, load_embeddings
from augkit.tagger import load_lexicon

REPO_ROOT = Path(__file__).resolve().parent.parent
MINI_VEC = REPO_ROOT / "fixtures" / "mini.vec"

CLUSTER_TAGS = ("NOUN", "VERB", "ADJ")


@pytest.fixture(scope="session")
def mini_store() -> EmbeddingStore:
    return load_embeddings(MINI_VEC)


@pytest.fixture()
def mini_vec_path() -> Path:
    return MINI_VEC


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


def cluster_tag(cluster: int) -> str:
    return CLUSTER_TAGS[cluster % len(CLUSTER_TAGS)]


def cluster_word(cluster: int, i: int) -> str:
    # purely alphabetic so the words pass the eligibility rules
    return f"{cluster_tag(cluster).lower()}{_LETTERS[cluster]}{_LETTERS[i]}"


def write_cluster_embeddings(
    path: Path,
    n_clusters: int = 6,
    words_per_cluster: int = 12,
    dim: int = 8,
    seed: int = 1234,
    spread: float = 0.06,
) -> list[str]:
    """Write a text-format embedding file whose vocabulary falls into
    nearly-orthogonal clusters; within a cluster all words are close, so
    nearest neighbors stay inside it. Returns the vocabulary in order."""
    assert n_clusters <= dim
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    words = []
    lines = [f"{n_clusters * words_per_cluster} {dim}"]
    for cluster in range(n_clusters):
        for i in range(words_per_cluster):
            word = cluster_word(cluster, i)
            vec = basis[cluster] + spread * rng.normal(size=dim)
            words.append(word)
            lines.append(word + " " + " ".join(f"{x:.8f}" for x in vec))
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8", newline="\n")
    return words


def write_cluster_lexicon(path: Path, n_clusters: int = 6, words_per_cluster: int = 12) -> None:
    lines = [
        f"{cluster_word(cluster, i)}\t{cluster_tag(cluster)}"
        for cluster in range(n_clusters)
        for i in range(words_per_cluster)
    ]
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8", newline="\n")


def make_sentence(rng: random.Random, clusters: list[int], length: int, words_per_cluster: int = 12) -> str:
    """A sentence of `length` tokens drawn uniformly from the given clusters,
    guaranteed to contain at least one noun-cluster token when available."""
    picks = [rng.choice(clusters) for _ in range(length)]
    noun_clusters = [c for c in clusters if cluster_tag(c) == "NOUN"]
    if noun_clusters and not any(cluster_tag(c) == "NOUN" for c in picks):
        picks[rng.randrange(length)] = rng.choice(noun_clusters)
    return " ".join(cluster_word(c, rng.randrange(words_per_cluster)) for c in picks)


def make_labeled_corpus(
    rng: random.Random,
    n_records: int,
    class_clusters: dict[str, list[int]],
    min_len: int = 4,
    max_len: int = 9,
    id_prefix: str = "",
) -> list[LabeledRecord]:
    """Class-separable corpus: each label draws its tokens from its own
    cluster set."""
    labels = sorted(class_clusters)
    records = []
    for i in range(n_records):
        label = labels[i % len(labels)]
        text = make_sentence(rng, class_clusters[label], rng.randint(min_len, max_len))
        records.append(LabeledRecord(f"{id_prefix}{i}", text, label))
    return records


@pytest.fixture(scope="session")
def cluster_world(tmp_path_factory):
    """Session-wide synthetic world: embeddings, lexicon, stopwords."""
    root = tmp_path_factory.mktemp("cluster_world")
    emb = root / "clusters.vec"
    lex = root / "clusters.lex"
    stop = root / "stopwords.txt"
    vocab = write_cluster_embeddings(emb)
    write_cluster_lexicon(lex)
    stop.write_text("och\nen\natt\n", encoding="utf-8")
    return {
        "embeddings": emb,
        "lexicon": lex,
        "stopwords": stop,
        "vocab": vocab,
        "store": load_embeddings(emb),
        "lex": load_lexicon(lex),
        "stops": load_stopwords(stop),
    }
