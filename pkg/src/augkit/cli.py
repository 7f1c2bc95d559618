"""Command-line client for the augmentation service.

Every subcommand talks to the HTTP service: either a remote one via
``--server URL`` or, by default, an in-process instance of the same app, so
batch runs need no running daemon. File reading and writing stay on the
client side; all augmentation work happens behind the service interface.

Exit codes: 0 success, 1 usage error, 2 data error. Every generated file
starts with a ``#meta`` header line carrying the tool version, seed, and
config, and dataset outputs load back unchanged with ``load_dataset``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .augment import CANONICAL_OPS, MODES
from .corpus import META_PREFIX, DATASET_FORMATS, LabeledRecord, dataset_lines, load_dataset
from .deviation import load_precomputed
from .errors import AugkitError, MalformedRow
from .experiment import CSV_HEADER, TECHNIQUES
from .tagger import parse_pretagged

DEFAULT_FRACTIONS = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0"


class UsageError(Exception):
    """Bad flags, paths, or server targets; maps to exit code 1."""


class ServiceError(Exception):
    """A data error reported by the service; maps to exit code 2."""

    def __init__(self, name: str, message: str):
        super().__init__(f"{name}: {message}")
        self.name = name


class ServiceClient:
    """Minimal JSON-over-HTTP client; in-process app when no server given."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=httpx.Timeout(600.0))
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from starlette.testclient import TestClient

            from .service.app import create_app

            self._client = TestClient(create_app())

    def request(self, method: str, path: str, payload: dict | None = None) -> dict:
        try:
            response = self._client.request(method, path, json=payload)
        except Exception as exc:  # connection problems are usage errors
            raise UsageError(f"cannot reach service: {exc}") from exc
        if response.status_code >= 500:
            raise UsageError(f"service failure on {path}: {response.text[:200]}")
        if response.status_code >= 400:
            try:
                body = response.json()
            except ValueError:
                body = {}
            name = body.get("error")
            if name:
                raise ServiceError(name, body.get("message", ""))
            raise UsageError(f"request to {path} rejected ({response.status_code}): {response.text[:200]}")
        return response.json() if response.content else {}

    def post(self, path: str, payload: dict) -> dict:
        return self.request("POST", path, payload)

    def delete(self, path: str) -> None:
        self.request("DELETE", path)

    def close(self) -> None:
        self._client.close()


def _require_paths(*pairs: tuple[str, str | None]) -> None:
    for flag, value in pairs:
        if value is not None and not Path(value).exists():
            raise UsageError(f"--{flag}: path {value!r} does not exist")


def _meta_line(command: str, args: argparse.Namespace, keys: tuple[str, ...]) -> str:
    config = {key: getattr(args, key) for key in keys if getattr(args, key, None) is not None}
    payload = {"command": command, "config": config, "tool": "augkit", "version": __version__}
    return META_PREFIX + json.dumps(payload, sort_keys=True, ensure_ascii=False)


def _write_output(path: str | None, content: str) -> None:
    if path is None:
        sys.stdout.write(content)
    else:
        Path(path).write_text(content, encoding="utf-8", newline="\n")


def _parse_ops(value: str) -> list[str]:
    ops = [op.strip().upper() for op in value.split(",") if op.strip()]
    unknown = [op for op in ops if op not in CANONICAL_OPS]
    if unknown or not ops:
        raise UsageError(f"--ops must be a comma list from {CANONICAL_OPS}, got {value!r}")
    return ops


def _parse_fractions(value: str) -> list[float]:
    try:
        fractions = [float(f) for f in value.split(",") if f.strip()]
    except ValueError as exc:
        raise UsageError(f"--fractions must be comma-separated numbers, got {value!r}") from exc
    if not fractions or any(not 0 < f <= 1 for f in fractions) or any(
        b <= a for a, b in zip(fractions, fractions[1:])
    ):
        raise UsageError("--fractions must be strictly increasing values in (0, 1]")
    return fractions


def _config_payload(args: argparse.Namespace, ops: list[str] | None = None) -> dict:
    payload = {
        "alpha": args.alpha,
        "n_aug": getattr(args, "n_aug", 1),
        "top_k": args.top_k,
        "seed": args.seed,
        "mode": getattr(args, "mode", "per-op"),
        "min_similarity": args.min_similarity,
    }
    if ops:
        payload["enabled_ops"] = ops
    labels = getattr(args, "augment_labels", None)
    if labels:
        payload["augment_labels"] = [l for l in labels.split(",") if l]
    tag = getattr(args, "tag", None)
    if tag:
        payload["tssr_tag"] = tag
    return payload


def _record_payload(records: list[LabeledRecord]) -> list[dict]:
    return [{"id": r.id, "text": r.text, "label": r.label} for r in records]


def _create_handle(client: ServiceClient, args: argparse.Namespace, config: dict) -> str:
    payload: dict = {"embeddings_path": args.embeddings, "config": config}
    if getattr(args, "stopwords", None):
        payload["stopwords_path"] = args.stopwords
    if getattr(args, "lexicon", None):
        payload["lexicon_path"] = args.lexicon
    return client.post("/handles", payload)["handle_id"]


def _variant_records(variants: list[dict], include_noops: bool) -> list[LabeledRecord]:
    out = []
    for v in variants:
        if v["noop"] and not include_noops:
            continue
        out.append(LabeledRecord(f"{v['source_id']}#{v['op']}#{v['variant_index']}", v["text"], v["label"]))
    return out


META_KEYS_AUG = ("alpha", "n_aug", "top_k", "seed", "ops", "mode", "augment_labels", "min_similarity")


def cmd_augment(args: argparse.Namespace, client: ServiceClient) -> int:
    _require_paths(("embeddings", args.embeddings), ("stopwords", args.stopwords), ("dataset", args.dataset))
    ops = _parse_ops(args.ops)
    records = load_dataset(args.dataset, args.format)
    handle = _create_handle(client, args, _config_payload(args, ops))
    try:
        response = client.post(
            f"/handles/{handle}/augment-dataset",
            {"records": _record_payload(records), "technique": "EDDA", "ops": ops},
        )
    finally:
        client.delete(f"/handles/{handle}")
    out_records = records + _variant_records(response["variants"], include_noops=False)
    out_format = args.output_format or args.format
    lines = [_meta_line("augment", args, META_KEYS_AUG)] + dataset_lines(out_records, out_format)
    _write_output(args.output, "".join(line + "\n" for line in lines))
    print(f"wrote {len(out_records)} records ({response['added']} variants, {response['noop_count']} noops)")
    return 0


META_KEYS_TSSR = ("alpha", "top_k", "seed", "tag", "n", "min_similarity")


def cmd_tssr(args: argparse.Namespace, client: ServiceClient) -> int:
    if bool(args.dataset) == bool(args.pretagged):
        raise UsageError("exactly one of --dataset and --pretagged is required")
    _require_paths(
        ("embeddings", args.embeddings),
        ("stopwords", args.stopwords),
        ("lexicon", args.lexicon),
        ("dataset", args.dataset),
        ("pretagged", args.pretagged),
    )
    config = _config_payload(args)
    config["n_aug"] = args.n
    if args.tag:
        config["tssr_tag"] = args.tag
    handle = _create_handle(client, args, config)
    variants: list[dict] = []
    noops = 0
    try:
        if args.dataset:
            records = load_dataset(args.dataset, args.format)
            response = client.post(
                f"/handles/{handle}/augment-dataset",
                {"records": _record_payload(records), "technique": "TSSR"},
            )
            variants = response["variants"]
            noops = response["noop_count"]
        else:
            for rid, sentence, label in parse_pretagged(args.pretagged):
                response = client.post(
                    f"/handles/{handle}/tssr",
                    {
                        "text": sentence.raw,
                        "label": label,
                        "tag": args.tag,
                        "n": args.n,
                        "record_id": rid,
                        "tagged": [{"form": t.surface, "tag": t.pos_tag} for t in sentence.tokens],
                    },
                )
                variants.extend(response["variants"])
            noops = sum(1 for v in variants if v["noop"])
    finally:
        client.delete(f"/handles/{handle}")
    out_records = _variant_records(variants, include_noops=True)
    lines = [_meta_line("tssr", args, META_KEYS_TSSR)] + dataset_lines(out_records, args.output_format or args.format)
    _write_output(args.output, "".join(line + "\n" for line in lines))
    print(f"wrote {len(out_records)} variant rows ({noops} noops)")
    return 0


def cmd_neighbors(args: argparse.Namespace, client: ServiceClient) -> int:
    _require_paths(("embeddings", args.embeddings))
    handle = _create_handle(client, args, {"seed": args.seed})
    try:
        response = client.post(f"/handles/{handle}/neighbors", {"word": args.word, "k": args.k})
    finally:
        client.delete(f"/handles/{handle}")
    lines = [_meta_line("neighbors", args, ("word", "k", "seed"))]
    lines += [f"{n['word']}\t{n['score']:.6f}" for n in response["neighbors"]]
    _write_output(args.output, "".join(line + "\n" for line in lines))
    return 0


def _pair_ids(originals: list[LabeledRecord], augmented: list[LabeledRecord]) -> list[tuple[str, str]]:
    by_id = {r.id: r for r in originals}
    pairs = []
    for record in augmented:
        source_id = record.id.split("#", 1)[0]
        if source_id not in by_id:
            raise MalformedRow(f"augmented record {record.id!r} has no matching original {source_id!r}")
        pairs.append((source_id, record.id))
    return pairs


def cmd_deviation(args: argparse.Namespace, client: ServiceClient) -> int:
    _require_paths(
        ("original", args.original),
        ("augmented", args.augmented),
        ("orig-vectors", args.orig_vectors),
        ("aug-vectors", args.aug_vectors),
    )
    if bool(args.orig_vectors) != bool(args.aug_vectors):
        raise UsageError("--orig-vectors and --aug-vectors must be given together")
    originals = load_dataset(args.original, args.format)
    augmented = load_dataset(args.augmented, args.format)
    id_pairs = _pair_ids(originals, augmented)
    if args.orig_vectors:
        orig_vecs = load_precomputed(args.orig_vectors)
        aug_vecs = load_precomputed(args.aug_vectors)
        pairs = [
            {
                "original": list(map(float, orig_vecs.get(a, []))),
                "augmented": list(map(float, aug_vecs.get(b, []))),
            }
            for a, b in id_pairs
        ]
        report = client.post("/deviation-from-vectors", {"pairs": pairs, "delta": args.delta})
    else:
        if not args.embeddings:
            raise UsageError("--embeddings is required unless precomputed vectors are given")
        _require_paths(("embeddings", args.embeddings), ("stopwords", args.stopwords))
        by_orig = {r.id: r.text for r in originals}
        by_aug = {r.id: r.text for r in augmented}
        handle = _create_handle(client, args, {"seed": args.seed})
        try:
            report = client.post(
                f"/handles/{handle}/deviation-report",
                {
                    "pairs": [{"original": by_orig[a], "augmented": by_aug[b]} for a, b in id_pairs],
                    "delta": args.delta,
                },
            )
        finally:
            client.delete(f"/handles/{handle}")
    lines = [_meta_line("deviation", args, ("delta", "seed")), json.dumps(report, sort_keys=True)]
    _write_output(args.output, "".join(line + "\n" for line in lines))
    return 0


def cmd_partition(args: argparse.Namespace, client: ServiceClient) -> int:
    _require_paths(("dataset", args.dataset))
    fractions = _parse_fractions(args.fractions)
    records = load_dataset(args.dataset, args.format)
    response = client.post(
        "/partition",
        {"records": _record_payload(records), "fractions": fractions, "seed": args.seed},
    )
    lines = [_meta_line("partition", args, ("fractions", "seed"))]
    for partition in response["partitions"]:
        lines.append(json.dumps({"fraction": f"{partition['fraction']:.2f}", "ids": partition["ids"]}, sort_keys=True))
    _write_output(args.output, "".join(line + "\n" for line in lines))
    return 0


META_KEYS_EXPERIMENT = META_KEYS_AUG + ("fractions", "techniques", "epochs", "lam", "delta", "tag")


def cmd_experiment(args: argparse.Namespace, client: ServiceClient) -> int:
    _require_paths(
        ("embeddings", args.embeddings),
        ("stopwords", args.stopwords),
        ("lexicon", args.lexicon),
        ("train", args.train),
        ("test", args.test),
    )
    fractions = _parse_fractions(args.fractions)
    techniques = [t.strip() for t in args.techniques.split(",") if t.strip()]
    unknown = [t for t in techniques if t not in TECHNIQUES]
    if unknown or not techniques:
        raise UsageError(f"--techniques must be a comma list from {TECHNIQUES}, got {args.techniques!r}")
    ops = _parse_ops(args.ops)
    train = load_dataset(args.train, args.format)
    test = load_dataset(args.test, args.format)
    if args.format == "tsv":
        # TSV ids are positional, so namespace the test side to keep the
        # train/test id spaces disjoint
        test = [LabeledRecord(f"t{r.id}", r.text, r.label) for r in test]
    handle = _create_handle(client, args, _config_payload(args, ops))
    try:
        response = client.post(
            f"/handles/{handle}/experiment",
            {
                "train": _record_payload(train),
                "test": _record_payload(test),
                "fractions": fractions,
                "techniques": techniques,
                "epochs": args.epochs,
                "lam": args.lam,
                "delta": args.delta,
                "workers": args.workers,
            },
        )
    finally:
        client.delete(f"/handles/{handle}")
    lines = [_meta_line("experiment", args, META_KEYS_EXPERIMENT), CSV_HEADER]
    for cell in response["cells"]:
        lines.append(
            f"{cell['fraction']:.2f},{cell['technique']},{cell['macro_f1']:.6f},{cell['weighted_f1']:.6f},"
            f"{cell['n_train']},{cell['n_aug_added']},{cell['noop_count']}"
        )
    _write_output(args.output, "".join(line + "\n" for line in lines))
    return 0


def cmd_serve(args: argparse.Namespace, _client: ServiceClient | None) -> int:
    import uvicorn

    uvicorn.run("augkit.service.app:app", host=args.host, port=args.port, log_level="warning")
    return 0


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--server", help="base URL of a running service; in-process by default")
    parser.add_argument("--config", help="flat key=value config file; command-line flags win")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", help="output file (stdout when omitted)")


def _add_resources(parser: argparse.ArgumentParser, lexicon: bool = False) -> None:
    parser.add_argument("--embeddings", required=False, help="word-embedding file in text format")
    parser.add_argument("--stopwords", help="stopword file, one word per line")
    if lexicon:
        parser.add_argument("--lexicon", help="POS lexicon TSV (word<TAB>tag)")


def _add_aug_params(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, default=0.2, help="perturbation rate")
    parser.add_argument("--top-k", type=int, default=10, help="neighbor pool size")
    parser.add_argument("--min-similarity", type=float, default=0.0, help="cosine floor for candidates")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="augkit", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"augkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="augment a dataset with the distributional edit operations")
    _add_common(p)
    _add_resources(p)
    _add_aug_params(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=DATASET_FORMATS, default="tsv")
    p.add_argument("--output-format", choices=DATASET_FORMATS)
    p.add_argument("--ops", default=",".join(CANONICAL_OPS), help="comma list of operations to apply")
    p.add_argument("--mode", choices=MODES, default="per-op")
    p.add_argument("--n-aug", type=int, default=1, help="augmentation rounds per record")
    p.add_argument("--augment-labels", help="only augment records with these comma-separated labels")
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("tssr", help="tag-constrained single-token replacement")
    _add_common(p)
    _add_resources(p, lexicon=True)
    _add_aug_params(p)
    p.add_argument("--dataset")
    p.add_argument("--pretagged", help="CoNLL-style pre-tagged input instead of --dataset")
    p.add_argument("--format", choices=DATASET_FORMATS, default="tsv")
    p.add_argument("--output-format", choices=DATASET_FORMATS)
    p.add_argument("--tag", help="POS tag to constrain replacement to")
    p.add_argument("--n", type=int, default=1, help="variants per sentence")
    p.set_defaults(func=cmd_tssr)

    p = sub.add_parser("neighbors", help="query nearest neighbors of a word")
    _add_common(p)
    _add_resources(p)
    p.add_argument("--word", required=True)
    p.add_argument("--k", type=int, default=10)
    p.set_defaults(func=cmd_neighbors)

    p = sub.add_parser("deviation", help="semantic-deviation report for augmented pairs")
    _add_common(p)
    _add_resources(p)
    p.add_argument("--original", required=True, help="dataset of source records")
    p.add_argument("--augmented", required=True, help="dataset of augmented records (ids source#op#k)")
    p.add_argument("--format", choices=DATASET_FORMATS, default="tsv")
    p.add_argument("--delta", type=float, default=0.9)
    p.add_argument("--orig-vectors", help="precomputed sentence vectors for originals (id<TAB>values)")
    p.add_argument("--aug-vectors", help="precomputed sentence vectors for augmented records")
    p.set_defaults(func=cmd_deviation)

    p = sub.add_parser("partition", help="emit nested stratified partition id lists")
    _add_common(p)
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=DATASET_FORMATS, default="tsv")
    p.add_argument("--fractions", default=DEFAULT_FRACTIONS)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("experiment", help="partition x technique F1 table")
    _add_common(p)
    _add_resources(p, lexicon=True)
    _add_aug_params(p)
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--format", choices=DATASET_FORMATS, default="tsv")
    p.add_argument("--fractions", default=DEFAULT_FRACTIONS)
    p.add_argument("--techniques", default=",".join(TECHNIQUES))
    p.add_argument("--ops", default=",".join(CANONICAL_OPS))
    p.add_argument("--mode", choices=MODES, default="per-op")
    p.add_argument("--n-aug", type=int, default=1)
    p.add_argument("--augment-labels")
    p.add_argument("--tag", help="POS tag for the TSSR technique")
    p.add_argument("--epochs", type=int, default=20)
    p.add_argument("--lam", type=float, default=1e-4)
    p.add_argument("--delta", type=float, default=0.9)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def _load_config_tokens(path: str) -> list[str]:
    if not Path(path).exists():
        raise UsageError(f"--config: path {path!r} does not exist")
    tokens: list[str] = []
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").split("\n"), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"--config line {lineno}: expected key=value, got {line!r}")
        key, value = line.split("=", 1)
        flag = "--" + key.strip().replace("_", "-")
        value = value.strip()
        if value.lower() == "true":
            tokens.append(flag)
        elif value.lower() != "false":
            tokens.extend([flag, value])
    return tokens


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:]) if argv is None else list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "config", None):
            config_tokens = _load_config_tokens(args.config)
            args = parser.parse_args([argv[0]] + config_tokens + argv[1:])
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1

    if args.func is cmd_serve:
        return cmd_serve(args, None)
    client = ServiceClient(getattr(args, "server", None))
    try:
        return args.func(args, client)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (AugkitError, ServiceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    finally:
        client.close()


def entrypoint() -> None:
    sys.exit(main())
