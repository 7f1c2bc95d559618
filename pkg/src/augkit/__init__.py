"""Deterministic text augmentation from word-embedding neighborhoods.

Works for any language given a text-format word-embedding file, an optional
stopword list, and an optional POS lexicon. Ships a core library, an HTTP
service that keeps loaded embeddings resident, and a CLI client.
"""

__version__ = "0.1.0"

from .augment import (
    AugmentationConfig,
    AugmentedRecord,
    Edit,
    Resources,
    derive_rng,
    derive_seed,
    edda,
    find_candidate,
    find_random_token,
    rd,
    ri,
    rs,
    rsr,
    tssr,
)
from .corpus import (
    LabeledRecord,
    Sentence,
    StopwordSet,
    Token,
    detokenize,
    load_dataset,
    load_stopwords,
    tokenize,
    write_dataset,
)
from .deviation import DeviationReport, DeviationVerdict, deviation_report, deviction
from .embedding import (
    EmbeddingStore,
    NeighborResult,
    SentenceEmbedding,
    cosine,
    load_embeddings,
    nearest_neighbors,
    sentence_embedding,
)
from .experiment import (
    EvalResult,
    LinearModel,
    Partition,
    PartitionSpec,
    TrainConfig,
    augment_partition,
    f1_scores,
    predict,
    run_experiment,
    stratified_partitions,
)
from .tagger import PosLexicon, UNK_TAG, load_lexicon, parse_pretagged, tag_sentence

__all__ = [name for name in dir() if not name.startswith("_")]
