"""Batch command line: train embeddings on N-Triples, evaluate link
prediction, compute distributional metrics, project vectors, inspect models.

Exit codes: 0 success, 1 runtime failure, 2 usage or unreadable input.
Every subcommand draws all of its randomness from one --seed value.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time

import numpy as np

from .errors import FlagError, KgvecError
from .evaluation import EvalConfig, evaluate_with_scorer
from .graph import (
    DEFAULT_TYPE_PREDICATES,
    build_index,
    build_vocabulary,
    encode_corpus,
    resolve_type_predicates,
)
from .lstm import MAGIC as SCORER_MAGIC
from .lstm import load_scorer, save_scorer, scorer_summary
from .metrics import metric_trace, write_trace
from .model import load_model, save_model, save_model_binary
from .scoring import NeuralTripleScorer
from .ntriples import parse_ntriples
from .projection import pca_project, write_projection
from .trainer import PHASE_SAVE, PHASE_TRAIN, PHASE_VOCAB, TrainConfig, train


def _ingest(path):
    """Parse an N-Triples file; unreadable paths are a usage-level failure."""
    try:
        return parse_ntriples(path)
    except OSError as exc:
        print(f"error [ingest]: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _load_model_or_fail(path):
    try:
        return load_model(path)
    except OSError as exc:
        print(f"error [ingest]: cannot read model {path}: {exc}", file=sys.stderr)
        raise SystemExit(2)


def _encode_against_model(raw, model):
    """Encode a dataset with a model's vocabulary (roles come from the data)."""
    corpus = encode_corpus(raw, model.vocabulary)
    return np.asarray(corpus, dtype=np.int64).reshape(-1, 3)


def cmd_train(args) -> int:
    started = time.perf_counter()
    raw, parse_stats = _ingest(args.input)
    vocabulary = build_vocabulary(raw, args.min_count)
    corpus = encode_corpus(raw, vocabulary)
    vocab_seconds = time.perf_counter() - started

    config = TrainConfig(
        dim=args.dim,
        negative=args.negative,
        epochs=args.epochs,
        alpha=args.lr,
        workers=args.workers,
        seed=args.seed,
        backend=args.backend,
    )
    model, stats = train(corpus, vocabulary, config)
    stats.phase_seconds[PHASE_VOCAB] = vocab_seconds

    save_started = time.perf_counter()
    which = "output" if args.output_vectors else "input"
    save_model(model, args.out, which)
    if args.binary:
        save_model_binary(model, args.out + ".bin", which)
    if args.vocab_out:
        vocabulary.save(args.vocab_out)
    stats.phase_seconds[PHASE_SAVE] = time.perf_counter() - save_started

    for phase in (PHASE_VOCAB, PHASE_TRAIN, PHASE_SAVE):
        print(f"phase {phase}: {stats.phase_seconds.get(phase, 0.0):.2f} s")
    print(f"rate: {stats.rate:.0f} triples/s")
    payload = stats.to_dict()
    payload["parse"] = dataclasses.asdict(parse_stats)
    payload["vocabulary"] = len(vocabulary)
    print(json.dumps(payload, sort_keys=True))
    if args.stats:
        with open(args.stats, "w", encoding="utf-8") as out:
            out.write(json.dumps(payload, indent=2, sort_keys=True))
            out.write("\n")
    return 0


def cmd_eval(args) -> int:
    model = _load_model_or_fail(args.model)
    raw, _ = _ingest(args.input)
    corpus = _encode_against_model(raw, model)
    config = EvalConfig(
        scorer=args.scorer,
        negatives=args.negatives,
        fraction=args.split,
        seed=args.seed,
        epsilon=args.epsilon,
        max_comparisons=args.sample,
        corrupt_subject=not args.object_only,
        filtered=not args.unfiltered,
        scorer_epochs=args.scorer_epochs,
        scorer_batch=args.batch,
    )
    report, scorer = evaluate_with_scorer(model, corpus, config)
    if args.scorer_out or args.dump_json:
        if not isinstance(scorer, NeuralTripleScorer):
            raise FlagError("only the lstm scorer can be serialized")
        if args.scorer_out:
            save_scorer(scorer.scorer, args.scorer_out)
        if args.dump_json:
            with open(args.dump_json, "w", encoding="utf-8") as out:
                out.write(scorer_summary(scorer.scorer))
                out.write("\n")
    text = report.to_json()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as out:
            out.write(text)
            out.write("\n")
    else:
        print(text)
    print(report.to_table(), file=sys.stderr)
    return 0


def cmd_metrics(args) -> int:
    model = _load_model_or_fail(args.model)
    raw, _ = _ingest(args.input)
    corpus = _encode_against_model(raw, model)
    type_uris = [u for u in args.type_predicates.split(",") if u]
    index = build_index(corpus, resolve_type_predicates(model.vocabulary, type_uris))

    if args.ordering:
        with open(args.ordering, encoding="utf-8") as handle:
            uris = [line.strip() for line in handle if line.strip()]
        ordering = [model.vocabulary.id_of(u) for u in uris]
    else:
        entity_ids = model.vocabulary.entity_ids()
        rng = np.random.default_rng(np.random.SeedSequence(args.seed))
        ordering = list(entity_ids[rng.permutation(len(entity_ids))])
    if args.sample is not None:
        ordering = ordering[: args.sample]

    trace = metric_trace(
        model, index, ordering, args.neighbours, args.metric, args.stride
    )
    if args.out:
        write_trace(trace, model.vocabulary, args.out)
    print(f"{args.metric} = {trace.final_value:.10f}")
    return 0


def cmd_project(args) -> int:
    model = _load_model_or_fail(args.model)
    if args.entities:
        with open(args.entities, encoding="utf-8") as handle:
            uris = [line.strip() for line in handle if line.strip()]
        ids = np.array([model.vocabulary.id_of(u) for u in uris], dtype=np.int64)
    else:
        ids = model.vocabulary.entity_ids()
        if len(ids) == 0:
            # model files carry no role information; fall back to all tokens
            ids = np.arange(model.size, dtype=np.int64)
        uris = [model.vocabulary.uri_of(int(i)) for i in ids]
    matrix, coords = pca_project(model.published(), args.rank, ids)
    if args.out:
        write_projection(args.out, uris, coords)
    else:
        for uri, row in zip(uris, coords):
            print(uri + "\t" + "\t".join(f"{x:.6f}" for x in row))
    ratios = ", ".join(f"{r:.4f}" for r in matrix.explained_variance_ratio)
    print(f"explained variance ratio: {ratios}", file=sys.stderr)
    return 0


def cmd_info(args) -> int:
    try:
        with open(args.model, "rb") as probe:
            is_scorer = probe.read(len(SCORER_MAGIC)) == SCORER_MAGIC
    except OSError as exc:
        print(f"error [ingest]: cannot read model {args.model}: {exc}", file=sys.stderr)
        raise SystemExit(2)
    if is_scorer:
        print(scorer_summary(load_scorer(args.model)))
        return 0
    model = _load_model_or_fail(args.model)
    norms = np.linalg.norm(np.asarray(model.published(), dtype=np.float64), axis=1)
    info = {
        "tokens": model.size,
        "dim": model.dim,
        "mean_norm": float(norms.mean()),
        "min_norm": float(norms.min()),
        "max_norm": float(norms.max()),
        "first_tokens": [model.vocabulary.uri_of(i) for i in range(min(5, model.size))],
    }
    print(json.dumps(info, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kgvec",
        description="Skip-gram knowledge-graph embeddings: training, "
        "triple scoring, link prediction, and distributional metrics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train embeddings on an N-Triples file")
    p_train.add_argument("input", help="N-Triples file (gzip detected by magic)")
    p_train.add_argument("--out", required=True, help="model text file to write")
    p_train.add_argument("--dim", type=int, default=100)
    p_train.add_argument("--epochs", type=int, default=5)
    p_train.add_argument("--negative", type=int, default=5)
    p_train.add_argument("--min-count", type=int, default=1)
    p_train.add_argument("--workers", type=int, default=1)
    p_train.add_argument("--seed", type=int, default=1)
    p_train.add_argument("--lr", type=float, default=0.025)
    p_train.add_argument(
        "--backend", choices=["auto", "numba", "numpy"], default="auto"
    )
    p_train.add_argument(
        "--output-vectors",
        action="store_true",
        help="publish the context matrix instead of the input matrix",
    )
    p_train.add_argument("--binary", action="store_true", help="also write <out>.bin")
    p_train.add_argument("--vocab-out", help="write the vocabulary sidecar here")
    p_train.add_argument("--stats", help="write phase timings JSON here")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="filtered link-prediction evaluation")
    p_eval.add_argument("model")
    p_eval.add_argument("input")
    p_eval.add_argument("--scorer", choices=["analogy", "lstm", "random"], default="analogy")
    p_eval.add_argument("--negatives", choices=["random", "corrupt"], default="corrupt")
    p_eval.add_argument("--split", type=float, default=0.9, help="train fraction")
    p_eval.add_argument("--seed", type=int, default=1)
    p_eval.add_argument("--epsilon", type=float, default=None)
    p_eval.add_argument(
        "--sample", type=int, default=None, help="cap analogy comparisons per query"
    )
    p_eval.add_argument("--object-only", action="store_true")
    p_eval.add_argument("--unfiltered", action="store_true")
    p_eval.add_argument("--scorer-epochs", type=int, default=100)
    p_eval.add_argument("--batch", type=int, default=128)
    p_eval.add_argument("--out", help="report JSON path (default: stdout)")
    p_eval.add_argument("--scorer-out", help="serialize the trained lstm scorer here")
    p_eval.add_argument(
        "--dump-json", help="write scorer tensor shapes and norms JSON here"
    )
    p_eval.set_defaults(func=cmd_eval)

    p_metrics = sub.add_parser("metrics", help="neighbour similarity metrics")
    p_metrics.add_argument("model")
    p_metrics.add_argument("input")
    p_metrics.add_argument("--metric", choices=["nst", "tct"], default="nst")
    p_metrics.add_argument("--neighbours", type=int, default=1)
    p_metrics.add_argument(
        "--ordering", help="entity URIs one per line; default seeded shuffle"
    )
    p_metrics.add_argument("--sample", type=int, default=None, help="prefix length cap")
    p_metrics.add_argument("--stride", type=int, default=1)
    p_metrics.add_argument(
        "--type-predicates",
        default=",".join(DEFAULT_TYPE_PREDICATES),
        help="comma-separated predicate URIs for tct",
    )
    p_metrics.add_argument("--seed", type=int, default=1)
    p_metrics.add_argument("--out", help="trace TSV path")
    p_metrics.set_defaults(func=cmd_metrics)

    p_project = sub.add_parser("project", help="PCA projection to k dimensions")
    p_project.add_argument("model")
    p_project.add_argument("--rank", type=int, default=3)
    p_project.add_argument("--entities", help="URIs one per line (default: all)")
    p_project.add_argument("--out", help="projection TSV path (default: stdout)")
    p_project.set_defaults(func=cmd_project)

    p_info = sub.add_parser("info", help="model summary")
    p_info.add_argument("model")
    p_info.set_defaults(func=cmd_info)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except FlagError as exc:
        print(f"error [flags]: {exc}", file=sys.stderr)
        return 2
    except (KgvecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
