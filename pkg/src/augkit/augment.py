"""The perturbation engine: four distributional edit operations, their
composition, and tag-constrained single-token replacement.

Everything here is deterministic under a seed. Each generated variant draws
from its own RNG, derived by hashing (seed, record id, round, operation),
so batch order and parallelism never change the output.

Operations:

* RSR - replace a fraction of eligible words with embedding neighbors
* RI  - insert embedding neighbors of random words at random slots
* RS  - swap random position pairs
* RD  - delete a fraction of positions
* TSSR - replace exactly one occurrence of a token with a requested tag
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass

from .corpus import (
    EMPTY_STOPWORDS,
    LabeledRecord,
    Sentence,
    StopwordSet,
    Token,
    detokenize,
    from_tokens,
    make_token,
    tokenize,
)
from .embedding import EmbeddingStore, nearest_neighbors, vocab_form
from .errors import NoCandidate, NoMatchingToken, OutOfVocabulary
from .tagger import EMPTY_LEXICON, PosLexicon, UNK_TAG, tag_sentence

CANONICAL_OPS = ("RSR", "RI", "RS", "RD")
MODES = ("per-op", "composed")


def derive_seed(seed: int, *parts: object) -> int:
    """Stable 64-bit child seed from a parent seed and context parts."""
    key = "\x1f".join([str(int(seed))] + [str(p) for p in parts])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rng(seed: int, *parts: object) -> random.Random:
    return random.Random(derive_seed(seed, *parts))


def edit_budget(alpha: float, eligible_count: int) -> int:
    """Number of edits for a perturbation rate: max(1, alpha*count) rounded
    half up. The floor of 1 keeps short sentences perturbable."""
    return max(1, int(alpha * eligible_count + 0.5))


@dataclass(frozen=True)
class AugmentationConfig:
    """Knobs shared by every augmentation entry point."""

    alpha: float = 0.2
    n_aug: int = 1
    top_k: int = 10
    seed: int = 0
    enabled_ops: tuple[str, ...] = CANONICAL_OPS
    mode: str = "per-op"
    augment_labels: frozenset[str] | None = None
    min_similarity: float = 0.0
    tssr_tag: str | None = None

    def __post_init__(self):
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must be in (0, 1]")
        if self.n_aug < 1:
            raise ValueError("n_aug must be >= 1")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        unknown = set(self.enabled_ops) - set(CANONICAL_OPS)
        if unknown:
            raise ValueError(f"unknown operations: {sorted(unknown)}")
        if not self.enabled_ops:
            raise ValueError("enabled_ops must not be empty")
        # normalize to canonical order so iteration never depends on set hashing
        ordered = tuple(op for op in CANONICAL_OPS if op in self.enabled_ops)
        object.__setattr__(self, "enabled_ops", ordered)
        if self.augment_labels is not None:
            object.__setattr__(self, "augment_labels", frozenset(self.augment_labels))


@dataclass(frozen=True)
class Edit:
    """One applied change; replace has both sides, insert/delete one."""

    position: int
    old: str | None
    new: str | None


@dataclass(frozen=True)
class AugmentedRecord:
    source_id: str
    variant_index: int
    op: str
    text: str
    label: str
    edits: tuple[Edit, ...] = ()
    noop: bool = True


@dataclass(frozen=True)
class Resources:
    """The loaded inputs every augmentation call needs."""

    store: EmbeddingStore
    stopwords: StopwordSet = EMPTY_STOPWORDS
    lexicon: PosLexicon | None = None


def _eligible_positions(sentence: Sentence, store: EmbeddingStore, stopwords: StopwordSet) -> list[int]:
    """Positions usable as replacement/insertion sources: alphabetic,
    non-stopword, and covered by the embedding vocabulary."""
    return [
        i
        for i, t in enumerate(sentence.tokens)
        if t.is_alphabetic
        and not stopwords.contains(t.lookup_form)
        and vocab_form(store, t.surface, t.lookup_form) is not None
    ]


def _match_case(old_surface: str, candidate: str) -> str:
    if old_surface[:1].isupper():
        return candidate[:1].upper() + candidate[1:]
    return candidate


def _pick_candidate(store: EmbeddingStore, token: Token, cfg: AugmentationConfig, rng: random.Random) -> str:
    form = vocab_form(store, token.surface, token.lookup_form)
    if form is None:
        raise OutOfVocabulary(f"token {token.surface!r} not in vocabulary")
    pool = [n for n in nearest_neighbors(store, form, cfg.top_k) if n.score >= cfg.min_similarity]
    if not pool:
        raise NoCandidate(f"no neighbor of {token.surface!r} reaches similarity {cfg.min_similarity}")
    return rng.choice(pool).word


def find_candidate(store: EmbeddingStore, token: Token, cfg: AugmentationConfig, rng: random.Random) -> str:
    """Uniform sample from the token's top-k neighbors above the similarity
    floor; case variants of the token itself are never candidates."""
    return _pick_candidate(store, token, cfg, rng)


def rsr(
    sentence: Sentence,
    store: EmbeddingStore,
    stopwords: StopwordSet,
    cfg: AugmentationConfig,
    rng: random.Random,
) -> tuple[Sentence, tuple[Edit, ...]]:
    """Replace a budgeted number of eligible tokens with sampled neighbors.

    Initial capitals carry over to the replacement. Positions whose
    candidate pool is emptied by the similarity floor are skipped.
    """
    eligible = _eligible_positions(sentence, store, stopwords)
    if not eligible:
        return sentence, ()
    n_edits = edit_budget(cfg.alpha, len(eligible))
    chosen = sorted(rng.sample(eligible, n_edits))
    tokens = list(sentence.tokens)
    edits = []
    for pos in chosen:
        old = tokens[pos]
        try:
            word = _pick_candidate(store, old, cfg, rng)
        except NoCandidate:
            continue
        new_surface = _match_case(old.surface, word)
        tokens[pos] = make_token(new_surface, stopwords)
        edits.append(Edit(pos, old.surface, new_surface))
    return from_tokens(tokens), tuple(edits)


def ri(
    sentence: Sentence,
    store: EmbeddingStore,
    stopwords: StopwordSet,
    cfg: AugmentationConfig,
    rng: random.Random,
) -> tuple[Sentence, tuple[Edit, ...]]:
    """Insert neighbors of random eligible tokens at random slots."""
    eligible = _eligible_positions(sentence, store, stopwords)
    if not eligible:
        return sentence, ()
    n_edits = edit_budget(cfg.alpha, len(eligible))
    tokens = list(sentence.tokens)
    edits = []
    for _ in range(n_edits):
        source = sentence.tokens[rng.choice(eligible)]
        try:
            word = _pick_candidate(store, source, cfg, rng)
        except NoCandidate:
            continue
        slot = rng.randrange(len(tokens) + 1)
        tokens.insert(slot, make_token(word, stopwords))
        edits.append(Edit(slot, None, word))
    return from_tokens(tokens), tuple(edits)


def rs(sentence: Sentence, cfg: AugmentationConfig, rng: random.Random) -> tuple[Sentence, tuple[Edit, ...]]:
    """Exchange a budgeted number of uniformly chosen position pairs."""
    if len(sentence) < 2:
        return sentence, ()
    n_edits = edit_budget(cfg.alpha, len(sentence))
    tokens = list(sentence.tokens)
    edits = []
    for _ in range(n_edits):
        i, j = rng.sample(range(len(tokens)), 2)
        edits.append(Edit(i, tokens[i].surface, tokens[j].surface))
        tokens[i], tokens[j] = tokens[j], tokens[i]
    return from_tokens(tokens), tuple(edits)


def rd(sentence: Sentence, cfg: AugmentationConfig, rng: random.Random) -> tuple[Sentence, tuple[Edit, ...]]:
    """Delete a budgeted number of positions; never empties the sentence."""
    if len(sentence) < 2:
        return sentence, ()
    n_edits = min(edit_budget(cfg.alpha, len(sentence)), len(sentence) - 1)
    doomed = sorted(rng.sample(range(len(sentence)), n_edits))
    edits = tuple(Edit(pos, sentence.tokens[pos].surface, None) for pos in doomed)
    doomed_set = set(doomed)
    tokens = [t for i, t in enumerate(sentence.tokens) if i not in doomed_set]
    return from_tokens(tokens), edits


def _apply_op(
    op: str,
    sentence: Sentence,
    resources: Resources,
    cfg: AugmentationConfig,
    rng: random.Random,
) -> tuple[Sentence, tuple[Edit, ...]]:
    if op == "RSR":
        return rsr(sentence, resources.store, resources.stopwords, cfg, rng)
    if op == "RI":
        return ri(sentence, resources.store, resources.stopwords, cfg, rng)
    if op == "RS":
        return rs(sentence, cfg, rng)
    if op == "RD":
        return rd(sentence, cfg, rng)
    raise ValueError(f"unknown operation {op!r}")


def edda(record: LabeledRecord, resources: Resources, cfg: AugmentationConfig) -> list[AugmentedRecord]:
    """Generate variants of one record with the enabled operations.

    In per-op mode each round yields one variant per enabled operation; in
    composed mode each round applies all enabled operations in RSR, RI, RS,
    RD order to a single variant. Records whose label is outside
    ``cfg.augment_labels`` (when set) yield nothing.
    """
    if cfg.augment_labels is not None and record.label not in cfg.augment_labels:
        return []
    sentence = tokenize(record.text, resources.stopwords)
    out: list[AugmentedRecord] = []
    for round_index in range(cfg.n_aug):
        if cfg.mode == "per-op":
            for op in cfg.enabled_ops:
                rng = derive_rng(cfg.seed, record.id, round_index, op)
                result, edits = _apply_op(op, sentence, resources, cfg, rng)
                out.append(
                    AugmentedRecord(
                        source_id=record.id,
                        variant_index=len(out),
                        op=op,
                        text=detokenize(result),
                        label=record.label,
                        edits=edits,
                        noop=not edits,
                    )
                )
        else:
            rng = derive_rng(cfg.seed, record.id, round_index, "EDDA")
            current = sentence
            edits: tuple[Edit, ...] = ()
            for op in cfg.enabled_ops:
                current, op_edits = _apply_op(op, current, resources, cfg, rng)
                edits += op_edits
            out.append(
                AugmentedRecord(
                    source_id=record.id,
                    variant_index=len(out),
                    op="EDDA",
                    text=detokenize(current),
                    label=record.label,
                    edits=edits,
                    noop=not edits,
                )
            )
    return out


def find_random_token(sentence: Sentence, tag: str | None, rng: random.Random) -> int:
    """Uniform position among tokens carrying ``tag``; with no tag given,
    among all tokens whose tag is known (not UNK)."""
    if tag is not None:
        positions = [i for i, t in enumerate(sentence.tokens) if t.pos_tag == tag]
    else:
        positions = [i for i, t in enumerate(sentence.tokens) if t.pos_tag not in (None, UNK_TAG)]
    if not positions:
        raise NoMatchingToken(f"no token with tag {tag!r}" if tag else "no tagged token")
    return rng.choice(positions)


def tssr(
    record: LabeledRecord,
    tag: str | None,
    n: int,
    resources: Resources,
    cfg: AugmentationConfig,
    sentence: Sentence | None = None,
) -> list[AugmentedRecord]:
    """Tag-constrained single-token replacement: n independent attempts,
    each replacing exactly one occurrence of a token with the requested tag
    by an embedding neighbor. Failed attempts (no matching token, token not
    in vocabulary, empty candidate pool) yield noop variants so exactly n
    records always come back.

    ``sentence`` may supply an externally tagged sentence; otherwise the
    record text is tokenized and tagged with the resource lexicon.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if sentence is None:
        lexicon = resources.lexicon if resources.lexicon is not None else EMPTY_LEXICON
        sentence = tag_sentence(tokenize(record.text, resources.stopwords), lexicon)
    out: list[AugmentedRecord] = []
    base_text = detokenize(sentence)
    for i in range(n):
        rng = derive_rng(cfg.seed, record.id, i, "TSSR")
        try:
            pos = find_random_token(sentence, tag, rng)
            old = sentence.tokens[pos]
            new_surface = _match_case(old.surface, _pick_candidate(resources.store, old, cfg, rng))
        except (NoMatchingToken, OutOfVocabulary, NoCandidate):
            out.append(AugmentedRecord(record.id, i, "TSSR", base_text, record.label))
            continue
        tokens = list(sentence.tokens)
        tokens[pos] = make_token(new_surface, resources.stopwords)
        out.append(
            AugmentedRecord(
                source_id=record.id,
                variant_index=i,
                op="TSSR",
                text=detokenize(from_tokens(tokens)),
                label=record.label,
                edits=(Edit(pos, old.surface, new_surface),),
                noop=False,
            )
        )
    return out
