"""HTTP service keeping loaded embedding stores resident.

A handle bundles one embedding store, stopword set, POS lexicon, and
augmentation config, all validated eagerly at creation. Every augmentation
endpoint delegates to the core library, so responses are byte-identical to
direct library calls with the same inputs. Data errors map to HTTP 400 with
the library error name in the payload; unknown handles map to 404.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..augment import AugmentationConfig, Resources, tssr
from ..corpus import EMPTY_STOPWORDS, LabeledRecord, Sentence, from_tokens, load_stopwords, make_token, tokenize
from ..deviation import DeviationReport, deviation_report, deviction
from ..embedding import load_embeddings, nearest_neighbors, sentence_embedding
from ..errors import AugkitError, UnknownHandle
from ..experiment import (
    PartitionSpec,
    TrainConfig,
    run_experiment,
    stratified_partitions,
    variants_for,
)
from ..tagger import load_lexicon
from . import schemas


@dataclass(frozen=True)
class Handle:
    resources: Resources
    config: AugmentationConfig


def create_app() -> FastAPI:
    app = FastAPI(title="augkit", version=__version__)
    handles: dict[str, Handle] = {}
    counter = itertools.count(1)

    @app.exception_handler(AugkitError)
    async def augkit_error(request: Request, exc: AugkitError):
        status = 404 if isinstance(exc, UnknownHandle) else 400
        return JSONResponse(status_code=status, content={"error": type(exc).__name__, "message": str(exc)})

    @app.exception_handler(ValueError)
    async def value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"error": "ValueError", "message": str(exc)})

    def get_handle(handle_id: str) -> Handle:
        try:
            return handles[handle_id]
        except KeyError:
            raise UnknownHandle(f"no handle {handle_id!r}") from None

    def variant_models(variants) -> list[schemas.VariantModel]:
        return [
            schemas.VariantModel(
                source_id=v.source_id,
                variant_index=v.variant_index,
                op=v.op,
                text=v.text,
                label=v.label,
                noop=v.noop,
                edits=[schemas.EditModel(position=e.position, old=e.old, new=e.new) for e in v.edits],
            )
            for v in variants
        ]

    def report_model(report: DeviationReport) -> schemas.DeviationReportModel:
        return schemas.DeviationReportModel(
            total_pairs=report.total_pairs,
            below_threshold=report.below_threshold,
            fraction_below=report.fraction_below,
            delta=report.delta,
            unembeddable_pairs=report.unembeddable_pairs,
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/handles", response_model=schemas.HandleInfo)
    def create_handle(req: schemas.CreateHandleRequest):
        store = load_embeddings(req.embeddings_path)
        stopwords = load_stopwords(req.stopwords_path) if req.stopwords_path else EMPTY_STOPWORDS
        lexicon = load_lexicon(req.lexicon_path) if req.lexicon_path else None
        config = req.config.to_config()
        resources = Resources(store=store, stopwords=stopwords, lexicon=lexicon)
        handle_id = f"h{next(counter)}"
        handles[handle_id] = Handle(resources=resources, config=config)
        return schemas.HandleInfo(
            handle_id=handle_id,
            dim=store.dim,
            vocab_size=len(store),
            stopword_count=len(resources.stopwords),
            lexicon_size=len(lexicon) if lexicon else 0,
        )

    @app.delete("/handles/{handle_id}", status_code=204)
    def delete_handle(handle_id: str):
        get_handle(handle_id)
        del handles[handle_id]

    @app.post("/handles/{handle_id}/edda", response_model=schemas.VariantsResponse)
    def edda_endpoint(handle_id: str, req: schemas.EddaRequest):
        handle = get_handle(handle_id)
        cfg = handle.config if req.seed is None else replace(handle.config, seed=req.seed)
        from ..augment import edda as edda_fn

        variants = edda_fn(LabeledRecord(req.record_id, req.text, req.label), handle.resources, cfg)
        return schemas.VariantsResponse(variants=variant_models(variants))

    @app.post("/handles/{handle_id}/tssr", response_model=schemas.VariantsResponse)
    def tssr_endpoint(handle_id: str, req: schemas.TssrRequest):
        handle = get_handle(handle_id)
        cfg = handle.config if req.seed is None else replace(handle.config, seed=req.seed)
        sentence: Sentence | None = None
        if req.tagged is not None:
            sentence = from_tokens(
                make_token(t.form, handle.resources.stopwords, pos_tag=t.tag) for t in req.tagged
            )
        record = LabeledRecord(req.record_id, req.text, req.label)
        variants = tssr(record, req.tag, req.n, handle.resources, cfg, sentence=sentence)
        return schemas.VariantsResponse(variants=variant_models(variants))

    @app.post("/handles/{handle_id}/deviction", response_model=schemas.DevictionResponse)
    def deviction_endpoint(handle_id: str, req: schemas.DevictionRequest):
        handle = get_handle(handle_id)
        store, stopwords = handle.resources.store, handle.resources.stopwords
        verdict = deviction(
            sentence_embedding(store, tokenize(req.text_a, stopwords)),
            sentence_embedding(store, tokenize(req.text_b, stopwords)),
            req.delta,
        )
        return schemas.DevictionResponse(similarity=verdict.similarity, verdict=verdict.verdict)

    @app.post("/handles/{handle_id}/neighbors", response_model=schemas.NeighborsResponse)
    def neighbors_endpoint(handle_id: str, req: schemas.NeighborsRequest):
        handle = get_handle(handle_id)
        results = nearest_neighbors(handle.resources.store, req.word, req.k, exclude=set(req.exclude))
        return schemas.NeighborsResponse(
            neighbors=[schemas.NeighborModel(word=r.word, score=r.score) for r in results]
        )

    @app.post("/handles/{handle_id}/augment-dataset", response_model=schemas.AugmentDatasetResponse)
    def augment_dataset(handle_id: str, req: schemas.AugmentDatasetRequest):
        handle = get_handle(handle_id)
        cfg = handle.config if req.seed is None else replace(handle.config, seed=req.seed)
        all_variants = []
        for record in req.records:
            all_variants.extend(
                variants_for(
                    LabeledRecord(record.id, record.text, record.label),
                    req.technique,
                    handle.resources,
                    cfg,
                    ops_override=req.ops,
                )
            )
        noops = sum(1 for v in all_variants if v.noop)
        return schemas.AugmentDatasetResponse(
            variants=variant_models(all_variants),
            added=len(all_variants) - noops,
            noop_count=noops,
        )

    @app.post("/handles/{handle_id}/deviation-report", response_model=schemas.DeviationReportModel)
    def deviation_report_endpoint(handle_id: str, req: schemas.DeviationReportRequest):
        handle = get_handle(handle_id)
        stopwords = handle.resources.stopwords
        pairs = [
            (tokenize(p.original, stopwords), tokenize(p.augmented, stopwords)) for p in req.pairs
        ]
        return report_model(deviation_report(pairs, handle.resources.store, req.delta))

    @app.post("/deviation-from-vectors", response_model=schemas.DeviationReportModel)
    def deviation_from_vectors(req: schemas.VectorReportRequest):
        # an empty vector marks a side that could not be embedded upstream
        total = below = unembeddable = 0
        for pair in req.pairs:
            total += 1
            na = math.sqrt(sum(x * x for x in pair.original))
            nb = math.sqrt(sum(x * x for x in pair.augmented))
            if na == 0.0 or nb == 0.0:
                below += 1
                unembeddable += 1
                continue
            dot = sum(a * b for a, b in zip(pair.original, pair.augmented)) / (na * nb)
            if dot < req.delta:
                below += 1
        return schemas.DeviationReportModel(
            total_pairs=total,
            below_threshold=below,
            fraction_below=below / total if total else 0.0,
            delta=req.delta,
            unembeddable_pairs=unembeddable,
        )

    @app.post("/partition", response_model=schemas.PartitionResponse)
    def partition_endpoint(req: schemas.PartitionRequest):
        records = [LabeledRecord(r.id, r.text, r.label) for r in req.records]
        partitions = stratified_partitions(records, PartitionSpec(tuple(req.fractions), req.seed))
        return schemas.PartitionResponse(
            partitions=[schemas.PartitionModel(fraction=p.fraction, ids=list(p.record_ids)) for p in partitions]
        )

    @app.post("/handles/{handle_id}/experiment", response_model=schemas.ExperimentResponse)
    def experiment_endpoint(handle_id: str, req: schemas.ExperimentRequest):
        handle = get_handle(handle_id)
        cells = run_experiment(
            [LabeledRecord(r.id, r.text, r.label) for r in req.train],
            [LabeledRecord(r.id, r.text, r.label) for r in req.test],
            PartitionSpec(tuple(req.fractions), handle.config.seed),
            req.techniques,
            handle.resources,
            handle.config,
            train_cfg=TrainConfig(epochs=req.epochs, lam=req.lam),
            delta=req.delta,
            workers=req.workers,
        )
        return schemas.ExperimentResponse(
            cells=[
                schemas.CellModel(
                    fraction=c.fraction,
                    technique=c.technique,
                    macro_f1=c.macro_f1,
                    weighted_f1=c.weighted_f1,
                    n_train=c.n_train,
                    n_aug_added=c.n_aug_added,
                    noop_count=c.noop_count,
                    fraction_below=c.fraction_below,
                )
                for c in cells
            ]
        )

    return app


app = create_app()
