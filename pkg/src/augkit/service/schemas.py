"""Request/response models for the augmentation service."""

from __future__ import annotations

from pydantic import BaseModel, Field

from ..augment import AugmentationConfig


class ConfigModel(BaseModel):
    alpha: float = 0.2
    n_aug: int = 1
    top_k: int = 10
    seed: int = 0
    enabled_ops: list[str] = ["RSR", "RI", "RS", "RD"]
    mode: str = "per-op"
    augment_labels: list[str] | None = None
    min_similarity: float = 0.0
    tssr_tag: str | None = None

    def to_config(self) -> AugmentationConfig:
        return AugmentationConfig(
            alpha=self.alpha,
            n_aug=self.n_aug,
            top_k=self.top_k,
            seed=self.seed,
            enabled_ops=tuple(self.enabled_ops),
            mode=self.mode,
            augment_labels=frozenset(self.augment_labels) if self.augment_labels is not None else None,
            min_similarity=self.min_similarity,
            tssr_tag=self.tssr_tag,
        )


class CreateHandleRequest(BaseModel):
    embeddings_path: str
    stopwords_path: str | None = None
    lexicon_path: str | None = None
    config: ConfigModel = ConfigModel()


class HandleInfo(BaseModel):
    handle_id: str
    dim: int
    vocab_size: int
    stopword_count: int
    lexicon_size: int


class RecordModel(BaseModel):
    id: str
    text: str
    label: str = Field(min_length=1)


class EditModel(BaseModel):
    position: int
    old: str | None
    new: str | None


class VariantModel(BaseModel):
    source_id: str
    variant_index: int
    op: str
    text: str
    label: str
    noop: bool
    edits: list[EditModel] = []


class EddaRequest(BaseModel):
    text: str
    label: str = Field(min_length=1)
    seed: int | None = None
    record_id: str = "0"


class TaggedToken(BaseModel):
    form: str = Field(min_length=1)
    tag: str = Field(min_length=1)


class TssrRequest(BaseModel):
    text: str
    label: str = Field(min_length=1)
    tag: str | None = None
    n: int = Field(default=1, ge=1)
    seed: int | None = None
    record_id: str = "0"
    tagged: list[TaggedToken] | None = None


class VariantsResponse(BaseModel):
    variants: list[VariantModel]


class DevictionRequest(BaseModel):
    text_a: str
    text_b: str
    delta: float = 0.9


class DevictionResponse(BaseModel):
    similarity: float
    verdict: str


class NeighborsRequest(BaseModel):
    word: str
    k: int = Field(default=10, ge=1)
    exclude: list[str] = []


class NeighborModel(BaseModel):
    word: str
    score: float


class NeighborsResponse(BaseModel):
    neighbors: list[NeighborModel]


class AugmentDatasetRequest(BaseModel):
    records: list[RecordModel]
    technique: str = "EDDA"
    ops: list[str] | None = None  # overrides enabled ops for the EDDA technique
    seed: int | None = None


class AugmentDatasetResponse(BaseModel):
    variants: list[VariantModel]
    added: int
    noop_count: int


class PartitionRequest(BaseModel):
    records: list[RecordModel]
    fractions: list[float] = [round(f / 10, 1) for f in range(1, 11)]
    seed: int = 0


class PartitionModel(BaseModel):
    fraction: float
    ids: list[str]


class PartitionResponse(BaseModel):
    partitions: list[PartitionModel]


class DeviationPair(BaseModel):
    original: str
    augmented: str


class DeviationReportRequest(BaseModel):
    pairs: list[DeviationPair]
    delta: float = 0.9


class DeviationReportModel(BaseModel):
    total_pairs: int
    below_threshold: int
    fraction_below: float
    delta: float
    unembeddable_pairs: int


class VectorPair(BaseModel):
    original: list[float]
    augmented: list[float]


class VectorReportRequest(BaseModel):
    pairs: list[VectorPair]
    delta: float = 0.9


class ExperimentRequest(BaseModel):
    train: list[RecordModel]
    test: list[RecordModel]
    fractions: list[float] = [round(f / 10, 1) for f in range(1, 11)]
    techniques: list[str] = ["baseline", "EDDA", "TSSR", "RSR"]
    epochs: int = 20
    lam: float = 1e-4
    delta: float = 0.9
    workers: int = Field(default=1, ge=1)


class CellModel(BaseModel):
    fraction: float
    technique: str
    macro_f1: float
    weighted_f1: float
    n_train: int
    n_aug_added: int
    noop_count: int
    fraction_below: float | None


class ExperimentResponse(BaseModel):
    cells: list[CellModel]


class HealthResponse(BaseModel):
    status: str
    version: str
