"""Partitioned evaluation harness: nested stratified partitions, technique
comparison, a seeded linear SVM on pooled sentence embeddings, and F1
scoring.

Partitions are nested (each fraction's ids are a prefix extension of the
previous fraction's) so techniques are compared on identical data at every
fraction, and learning curves reflect data volume alone. Every cell of the
fraction x technique table derives its training seed from (seed, fraction,
technique), so the full table is reproducible byte for byte regardless of
scheduling.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .augment import AugmentationConfig, Resources, derive_rng, derive_seed, edda, tssr
from .corpus import LabeledRecord, tokenize
from .deviation import DEFAULT_DELTA, deviation_report
from .embedding import sentence_embedding
from .errors import (
    DimensionMismatch,
    DuplicateId,
    EmptyDataset,
    EmptyEmbedding,
    LengthMismatch,
    SingleClass,
    ZeroVector,
)

TECHNIQUES = ("baseline", "EDDA", "TSSR", "RSR")

DECILE_FRACTIONS = tuple(round(f / 10, 1) for f in range(1, 11))

CSV_HEADER = "fraction,technique,macro_f1,weighted_f1,n_train,n_aug_added,noop_count"


@dataclass(frozen=True)
class PartitionSpec:
    fractions: tuple[float, ...] = DECILE_FRACTIONS
    seed: int = 0

    def __post_init__(self):
        if not self.fractions:
            raise ValueError("fractions must not be empty")
        if any(not 0 < f <= 1 for f in self.fractions):
            raise ValueError("fractions must lie in (0, 1]")
        if any(b <= a for a, b in zip(self.fractions, self.fractions[1:])):
            raise ValueError("fractions must be strictly increasing")


@dataclass(frozen=True)
class Partition:
    fraction: float
    record_ids: tuple[str, ...]


def stratified_partitions(records: Sequence[LabeledRecord], spec: PartitionSpec) -> list[Partition]:
    """Nested stratified subsets of the dataset, one per fraction.

    Within each label the records are shuffled once with a seed derived from
    (spec.seed, label); each fraction takes a prefix of that order, sized
    round(fraction * class_count) with a floor of one record per class.
    """
    if not records:
        raise EmptyDataset("cannot partition an empty dataset")
    groups: dict[str, list[str]] = {}
    for record in records:
        groups.setdefault(record.label, []).append(record.id)
    shuffled: dict[str, list[str]] = {}
    for label in sorted(groups):
        ids = list(groups[label])
        derive_rng(spec.seed, "partition", label).shuffle(ids)
        shuffled[label] = ids
    partitions = []
    for fraction in spec.fractions:
        ids: list[str] = []
        for label in sorted(shuffled):
            class_ids = shuffled[label]
            count = min(len(class_ids), max(1, int(fraction * len(class_ids) + 0.5)))
            ids.extend(class_ids[:count])
        partitions.append(Partition(fraction, tuple(ids)))
    return partitions


@dataclass(frozen=True)
class AugmentStats:
    added: int
    noops: int
    pairs: tuple[tuple[str, str], ...]  # (original text, variant text)


def variants_for(
    record: LabeledRecord,
    technique: str,
    resources: Resources,
    cfg: AugmentationConfig,
    ops_override: Sequence[str] | None = None,
):
    """All variants (noops included) one technique generates for a record.

    EDDA runs all four operations unless ``ops_override`` narrows them; RSR
    runs replacement only; TSSR honors cfg.tssr_tag and creates cfg.n_aug
    variants. The label-conditioning set applies to every technique.
    """
    if technique == "baseline":
        return []
    if technique == "EDDA":
        ops = tuple(ops_override) if ops_override else ("RSR", "RI", "RS", "RD")
        return edda(record, resources, replace(cfg, enabled_ops=ops))
    if technique == "RSR":
        return edda(record, resources, replace(cfg, enabled_ops=("RSR",), mode="per-op"))
    if technique == "TSSR":
        if cfg.augment_labels is not None and record.label not in cfg.augment_labels:
            return []
        return tssr(record, cfg.tssr_tag, cfg.n_aug, resources, cfg)
    raise ValueError(f"unknown technique {technique!r}")


def augment_partition_with_stats(
    records: Sequence[LabeledRecord],
    technique: str,
    resources: Resources,
    cfg: AugmentationConfig,
) -> tuple[list[LabeledRecord], AugmentStats]:
    """Original records plus all non-noop variants (with derived ids),
    alongside counts of added and noop variants and the text pairs needed
    for deviation reporting."""
    if technique == "baseline":
        return list(records), AugmentStats(0, 0, ())
    out = list(records)
    added = noops = 0
    pairs: list[tuple[str, str]] = []
    for record in records:
        for variant in variants_for(record, technique, resources, cfg):
            if variant.noop:
                noops += 1
                continue
            out.append(
                LabeledRecord(
                    id=f"{variant.source_id}#{variant.op}#{variant.variant_index}",
                    text=variant.text,
                    label=variant.label,
                )
            )
            added += 1
            pairs.append((record.text, variant.text))
    return out, AugmentStats(added, noops, tuple(pairs))


def augment_partition(
    records: Sequence[LabeledRecord],
    technique: str,
    resources: Resources,
    cfg: AugmentationConfig,
) -> list[LabeledRecord]:
    return augment_partition_with_stats(records, technique, resources, cfg)[0]


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    lam: float = 1e-4
    seed: int = 0


@dataclass(frozen=True)
class LinearModel:
    """One-vs-rest linear SVM; weight rows include a trailing bias column."""

    classes: tuple[str, ...]
    weights: np.ndarray  # shape (n_classes, dim + 1)
    config: TrainConfig


def _with_bias(features: np.ndarray) -> np.ndarray:
    return np.hstack([features, np.ones((features.shape[0], 1))])


def train_linear(features: np.ndarray, labels: Sequence[str], cfg: TrainConfig = TrainConfig()) -> LinearModel:
    """Train one-vs-rest hinge-loss classifiers by stochastic subgradient
    descent with step size 1/(lam*t) and projection onto the 1/sqrt(lam)
    ball. Deterministic under cfg.seed."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2:
        raise DimensionMismatch("features must be a 2-D array")
    if features.shape[0] != len(labels):
        raise LengthMismatch(f"{features.shape[0]} feature rows vs {len(labels)} labels")
    if features.shape[0] == 0:
        raise EmptyDataset("no training examples")
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise SingleClass(f"need >= 2 classes, got {classes}")
    x = _with_bias(features)
    n = x.shape[0]
    radius = 1.0 / np.sqrt(cfg.lam)
    weights = np.zeros((len(classes), x.shape[1]))
    for ci, cls in enumerate(classes):
        y = np.where(np.asarray(labels) == cls, 1.0, -1.0)
        rng = np.random.default_rng(derive_seed(cfg.seed, "svm", cls))
        picks = rng.integers(0, n, size=cfg.epochs * n)
        w = np.zeros(x.shape[1])
        for step, i in enumerate(picks, start=1):
            eta = 1.0 / (cfg.lam * step)
            margin = y[i] * (w @ x[i])
            w *= 1.0 - eta * cfg.lam
            if margin < 1.0:
                w += eta * y[i] * x[i]
            norm = np.linalg.norm(w)
            if norm > radius:
                w *= radius / norm
        weights[ci] = w
    return LinearModel(classes=classes, weights=weights, config=cfg)


def predict(model: LinearModel, features: np.ndarray) -> list[str]:
    """Argmax class per row; ties go to the lexicographically smaller label."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[1] + 1 != model.weights.shape[1]:
        raise DimensionMismatch(
            f"features of dim {features.shape[-1] if features.ndim else '?'} do not match model dim {model.weights.shape[1] - 1}"
        )
    scores = _with_bias(features) @ model.weights.T
    return [model.classes[i] for i in np.argmax(scores, axis=1)]


@dataclass(frozen=True)
class EvalResult:
    classes: tuple[str, ...]
    per_class: dict[str, tuple[float, float, float]]  # precision, recall, f1
    macro_f1: float
    weighted_f1: float
    confusion: np.ndarray  # rows gold, cols predicted, indexed by classes


def f1_scores(predictions: Sequence[str], golds: Sequence[str]) -> EvalResult:
    """Per-class precision/recall/F1 with the 0-when-undefined convention;
    macro averages over gold classes, weighted weights by gold support."""
    if len(predictions) != len(golds):
        raise LengthMismatch(f"{len(predictions)} predictions vs {len(golds)} golds")
    if not golds:
        raise EmptyDataset("no predictions to score")
    classes = tuple(sorted(set(golds) | set(predictions)))
    index = {c: i for i, c in enumerate(classes)}
    confusion = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for pred, gold in zip(predictions, golds):
        confusion[index[gold], index[pred]] += 1
    per_class = {}
    for c in classes:
        i = index[c]
        tp = confusion[i, i]
        pred_count = confusion[:, i].sum()
        gold_count = confusion[i, :].sum()
        precision = tp / pred_count if pred_count else 0.0
        recall = tp / gold_count if gold_count else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[c] = (float(precision), float(recall), float(f1))
    gold_classes = [c for c in classes if confusion[index[c], :].sum() > 0]
    supports = np.array([confusion[index[c], :].sum() for c in gold_classes], dtype=np.float64)
    f1s = np.array([per_class[c][2] for c in gold_classes])
    return EvalResult(
        classes=classes,
        per_class=per_class,
        macro_f1=float(f1s.mean()),
        weighted_f1=float((f1s * supports).sum() / supports.sum()),
        confusion=confusion,
    )


@dataclass(frozen=True)
class CellResult:
    fraction: float
    technique: str
    macro_f1: float
    weighted_f1: float
    n_train: int
    n_aug_added: int
    noop_count: int
    fraction_below: float | None = None  # deviation of added variants; None for baseline


def _embed_records(records: Sequence[LabeledRecord], resources: Resources):
    """Pooled embeddings for all embeddable records, keeping labels aligned."""
    rows, labels = [], []
    for record in records:
        try:
            emb = sentence_embedding(resources.store, tokenize(record.text, resources.stopwords))
        except (EmptyEmbedding, ZeroVector):
            continue
        rows.append(emb.vector)
        labels.append(record.label)
    if not rows:
        raise EmptyDataset("no record could be embedded")
    return np.vstack(rows), labels


def run_experiment(
    train_records: Sequence[LabeledRecord],
    test_records: Sequence[LabeledRecord],
    spec: PartitionSpec,
    techniques: Sequence[str],
    resources: Resources,
    cfg: AugmentationConfig,
    train_cfg: TrainConfig = TrainConfig(),
    delta: float = DEFAULT_DELTA,
    workers: int = 1,
) -> list[CellResult]:
    """The full fraction x technique table.

    Each cell augments its partition, trains on pooled embeddings, and
    scores the fixed test set. Cells are independent and may run on a
    thread pool; results are always assembled in (fraction, technique)
    order and are byte-identical for identical seeds.
    """
    train_ids = {r.id for r in train_records}
    overlap = train_ids & {r.id for r in test_records}
    if overlap:
        raise DuplicateId(f"test ids also present in training set: {sorted(overlap)[:5]}")
    for name in techniques:
        if name not in TECHNIQUES:
            raise ValueError(f"unknown technique {name!r}")
    partitions = stratified_partitions(train_records, spec)
    by_id = {r.id: r for r in train_records}
    test_features, test_golds = _embed_records(test_records, resources)

    def run_cell(partition: Partition, technique: str) -> CellResult:
        records = [by_id[i] for i in partition.record_ids]
        augmented, stats = augment_partition_with_stats(records, technique, resources, cfg)
        features, labels = _embed_records(augmented, resources)
        cell_seed = derive_seed(cfg.seed, "cell", f"{partition.fraction:.2f}", technique)
        model = train_linear(features, labels, replace(train_cfg, seed=cell_seed))
        result = f1_scores(predict(model, test_features), test_golds)
        fraction_below = None
        if technique != "baseline":
            pairs = [
                (tokenize(orig, resources.stopwords), tokenize(var, resources.stopwords))
                for orig, var in stats.pairs
            ]
            fraction_below = deviation_report(pairs, resources.store, delta).fraction_below
        return CellResult(
            fraction=partition.fraction,
            technique=technique,
            macro_f1=result.macro_f1,
            weighted_f1=result.weighted_f1,
            n_train=len(augmented),
            n_aug_added=stats.added,
            noop_count=stats.noops,
            fraction_below=fraction_below,
        )

    cells = [(p, t) for p in partitions for t in techniques]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda cell: run_cell(*cell), cells))
    return [run_cell(p, t) for p, t in cells]


def results_to_csv(results: Sequence[CellResult]) -> str:
    """Render the results table; fractions as two-decimal strings."""
    lines = [CSV_HEADER]
    for r in results:
        lines.append(
            f"{r.fraction:.2f},{r.technique},{r.macro_f1:.6f},{r.weighted_f1:.6f},{r.n_train},{r.n_aug_added},{r.noop_count}"
        )
    return "".join(line + "\n" for line in lines)
