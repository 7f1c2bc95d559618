"""Word-embedding store: text-format loading, exact cosine KNN, pooling.

Rows are unit-normalized once at load time so every cosine similarity is a
plain dot product. Nearest-neighbor queries are exact brute force over the
whole vocabulary; vocabularies at the scale this toolkit targets make an
approximate index unnecessary, and exactness keeps oracle testing trivial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Collection

import numpy as np

from .corpus import Sentence
from .errors import (
    DuplicateWord,
    EmptyEmbedding,
    HeaderMismatch,
    IoError,
    MalformedRow,
    NonFiniteValue,
    OutOfVocabulary,
    ZeroVector,
)


@dataclass(frozen=True)
class EmbeddingStore:
    """Immutable vocabulary -> unit-vector table."""

    dim: int
    vocab: dict[str, int]
    words: tuple[str, ...]
    matrix: np.ndarray

    def __contains__(self, word: str) -> bool:
        return word in self.vocab

    def __len__(self) -> int:
        return len(self.words)

    def row(self, word: str) -> np.ndarray:
        try:
            return self.matrix[self.vocab[word]]
        except KeyError:
            raise OutOfVocabulary(f"word {word!r} not in vocabulary") from None


@dataclass(frozen=True)
class NeighborResult:
    word: str
    score: float


@dataclass(frozen=True)
class SentenceEmbedding:
    """Unit-normalized pooled sentence vector plus its vocabulary coverage."""

    vector: np.ndarray
    covered_tokens: int


def load_embeddings(path: str | Path) -> EmbeddingStore:
    """Load a text-format embedding file (`<count> <dim>` header line,
    then `<word> <f1> ... <f_dim>` per line) and unit-normalize every row."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    lines = [line for line in raw.split("\n") if line]
    if not lines:
        raise MalformedRow(f"{path}: empty embedding file")
    header = lines[0].split(" ")
    if len(header) != 2 or not all(part.isdigit() for part in header):
        raise MalformedRow(f"{path}: header must be '<vocab_count> <dim>', got {lines[0]!r}")
    declared, dim = int(header[0]), int(header[1])
    data = lines[1:]
    if len(data) != declared:
        raise HeaderMismatch(f"{path}: header declares {declared} words, file has {len(data)}")

    vocab: dict[str, int] = {}
    matrix = np.empty((declared, dim), dtype=np.float64)
    for i, line in enumerate(data):
        parts = line.split(" ")
        word = parts[0]
        if len(parts) - 1 != dim:
            raise HeaderMismatch(f"{path} word {word!r}: expected {dim} values, got {len(parts) - 1}")
        if word in vocab:
            raise DuplicateWord(f"{path}: word {word!r} appears twice")
        try:
            values = [float(p) for p in parts[1:]]
        except ValueError as exc:
            raise MalformedRow(f"{path} word {word!r}: non-numeric value") from exc
        if not all(math.isfinite(v) for v in values):
            raise NonFiniteValue(f"{path} word {word!r}: non-finite value")
        row = np.asarray(values, dtype=np.float64)
        norm = float(np.linalg.norm(row))
        if norm == 0.0:
            raise ZeroVector(f"{path} word {word!r}: zero vector cannot be normalized")
        vocab[word] = i
        matrix[i] = row / norm
    matrix.setflags(write=False)
    return EmbeddingStore(dim=dim, vocab=vocab, words=tuple(vocab), matrix=matrix)


def cosine(store: EmbeddingStore, w1: str, w2: str) -> float:
    """Cosine similarity between two vocabulary words."""
    return float(store.row(w1) @ store.row(w2))


def nearest_neighbors(
    store: EmbeddingStore,
    word: str,
    k: int,
    exclude: Collection[str] = (),
) -> list[NeighborResult]:
    """Exact top-k cosine neighbors of ``word``.

    The query word itself, anything in ``exclude``, and case variants of the
    query are never returned. Results are sorted by descending score with
    ties broken by ascending word order; fewer than k results come back when
    the vocabulary is exhausted.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    if word not in store.vocab:
        raise OutOfVocabulary(f"word {word!r} not in vocabulary")
    query_index = store.vocab[word]
    query_lookup = word.lower()
    excluded = set(exclude)
    scores = store.matrix @ store.matrix[query_index]
    candidates = [
        i
        for i, w in enumerate(store.words)
        if i != query_index and w not in excluded and w.lower() != query_lookup
    ]
    candidates.sort(key=lambda i: (-scores[i], store.words[i]))
    return [NeighborResult(store.words[i], float(scores[i])) for i in candidates[:k]]


def vocab_form(store: EmbeddingStore, surface: str, lookup_form: str) -> str | None:
    """The form under which a token is found in the vocabulary, if any."""
    if surface in store.vocab:
        return surface
    if lookup_form in store.vocab:
        return lookup_form
    return None


def sentence_embedding(store: EmbeddingStore, sentence: Sentence) -> SentenceEmbedding:
    """Mean of the unit rows of all in-vocab tokens, re-normalized.

    Lookup tries the exact surface first, then the lowercased form.
    Out-of-vocabulary tokens are skipped; a sentence with no coverage raises
    EmptyEmbedding.
    """
    rows = []
    for token in sentence.tokens:
        form = vocab_form(store, token.surface, token.lookup_form)
        if form is not None:
            rows.append(store.matrix[store.vocab[form]])
    if not rows:
        raise EmptyEmbedding(f"no token of {sentence.raw!r} is in the vocabulary")
    mean = np.mean(rows, axis=0)
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        raise ZeroVector(f"token vectors of {sentence.raw!r} cancel exactly")
    vector = mean / norm
    vector.setflags(write=False)
    return SentenceEmbedding(vector=vector, covered_tokens=len(rows))
