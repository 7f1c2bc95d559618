"""Semantic-deviation verdicts and corpus-level deviation reports.

An (original, augmented) pair is "similar" when the cosine similarity of
the two sentence embeddings is at least the threshold delta (default 0.9,
with the boundary value itself counting as similar). The corpus report
aggregates how many pairs fall below the threshold; pairs with a side that
cannot be embedded at all are counted below and flagged separately so they
can be audited.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import Sentence
from .embedding import EmbeddingStore, SentenceEmbedding, sentence_embedding
from .errors import (
    DuplicateId,
    EmptyEmbedding,
    HeaderMismatch,
    IoError,
    MalformedRow,
    NonFiniteValue,
    ZeroVector,
)

DEFAULT_DELTA = 0.9

SIMILAR = "similar"
DISSIMILAR = "dissimilar"


@dataclass(frozen=True)
class DeviationVerdict:
    similarity: float
    verdict: str


@dataclass(frozen=True)
class DeviationReport:
    total_pairs: int
    below_threshold: int
    fraction_below: float
    delta: float
    unembeddable_pairs: int = 0


def deviction(orig: SentenceEmbedding, aug: SentenceEmbedding, delta: float = DEFAULT_DELTA) -> DeviationVerdict:
    """Similar when cos(orig, aug) >= delta; the boundary itself is similar."""
    similarity = float(orig.vector @ aug.vector)
    return DeviationVerdict(similarity, SIMILAR if similarity >= delta else DISSIMILAR)


def _report(verdicts: int, below: int, unembeddable: int, delta: float) -> DeviationReport:
    total = verdicts
    return DeviationReport(
        total_pairs=total,
        below_threshold=below,
        fraction_below=below / total if total else 0.0,
        delta=delta,
        unembeddable_pairs=unembeddable,
    )


def deviation_report(
    pairs: Iterable[tuple[Sentence, Sentence]],
    store: EmbeddingStore,
    delta: float = DEFAULT_DELTA,
) -> DeviationReport:
    """Aggregate deviction verdicts over (original, augmented) sentence pairs."""
    total = below = unembeddable = 0
    for original, augmented in pairs:
        total += 1
        try:
            verdict = deviction(sentence_embedding(store, original), sentence_embedding(store, augmented), delta)
        except (EmptyEmbedding, ZeroVector):
            below += 1
            unembeddable += 1
            continue
        if verdict.verdict == DISSIMILAR:
            below += 1
    return _report(total, below, unembeddable, delta)


def load_precomputed(path: str | Path) -> dict[str, np.ndarray]:
    """Load precomputed sentence vectors (`id<TAB>f1 f2 ... fD` per line),
    unit-normalizing each. Lets externally computed sentence encodings stand
    in for the pooled word-embedding ones."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    vectors: dict[str, np.ndarray] = {}
    dim: int | None = None
    for lineno, line in enumerate(raw.split("\n"), start=1):
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 2 or not fields[0]:
            raise MalformedRow(f"{path} line {lineno}: expected 'id<TAB>values'")
        sid = fields[0]
        if sid in vectors:
            raise DuplicateId(f"{path} line {lineno}: duplicate id {sid!r}")
        try:
            values = np.asarray([float(v) for v in fields[1].split(" ") if v], dtype=np.float64)
        except ValueError as exc:
            raise MalformedRow(f"{path} line {lineno}: non-numeric value") from exc
        if values.size == 0:
            raise MalformedRow(f"{path} line {lineno}: no vector values")
        if dim is None:
            dim = values.size
        elif values.size != dim:
            raise HeaderMismatch(f"{path} line {lineno}: dimension {values.size} != {dim}")
        if not np.isfinite(values).all():
            raise NonFiniteValue(f"{path} line {lineno}: non-finite value")
        norm = float(np.linalg.norm(values))
        if norm == 0.0:
            raise ZeroVector(f"{path} line {lineno}: zero vector")
        vectors[sid] = values / norm
    return vectors


def deviation_report_from_vectors(
    id_pairs: Sequence[tuple[str, str]],
    originals: dict[str, np.ndarray],
    augmented: dict[str, np.ndarray],
    delta: float = DEFAULT_DELTA,
) -> DeviationReport:
    """Deviation report over precomputed vectors; ids missing from either
    side count as unembeddable."""
    total = below = unembeddable = 0
    for orig_id, aug_id in id_pairs:
        total += 1
        a = originals.get(orig_id)
        b = augmented.get(aug_id)
        if a is None or b is None:
            below += 1
            unembeddable += 1
            continue
        if float(a @ b) < delta:
            below += 1
    return _report(total, below, unembeddable, delta)
