#!/usr/bin/env python
"""Measure end-to-end training throughput on a large uniform corpus.

Generates the corpus (unless --input is given), then times the three
pipeline phases the way the train subcommand reports them.
"""

import argparse
import json
import tempfile
import time
from pathlib import Path

import numpy as np

from kgvec.graph import build_vocabulary, encode_corpus
from kgvec.model import save_model
from kgvec.ntriples import parse_ntriples
from kgvec.synth import write_uniform_corpus
from kgvec.trainer import PHASE_SAVE, PHASE_TRAIN, PHASE_VOCAB, TrainConfig, train


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--input", help="N-Triples file (default: generated)")
    ap.add_argument("--triples", type=int, default=1_000_000)
    ap.add_argument("--dim", type=int, default=64)
    ap.add_argument("--epochs", type=int, default=1)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", help="model file (default: temp file)")
    args = ap.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        source = args.input
        if source is None:
            source = str(Path(tmp) / "uniform.nt")
            write_uniform_corpus(source, args.triples, seed=args.seed)

        started = time.perf_counter()
        raw, parse_stats = parse_ntriples(source)
        vocabulary = build_vocabulary(raw)
        corpus = np.asarray(encode_corpus(raw, vocabulary), dtype=np.int64)
        vocab_seconds = time.perf_counter() - started

        model, stats = train(
            corpus,
            vocabulary,
            TrainConfig(
                dim=args.dim, epochs=args.epochs, workers=args.workers, seed=args.seed
            ),
        )
        stats.phase_seconds[PHASE_VOCAB] = vocab_seconds

        out = args.out or str(Path(tmp) / "model.txt")
        save_started = time.perf_counter()
        save_model(model, out)
        stats.phase_seconds[PHASE_SAVE] = time.perf_counter() - save_started

        for phase in (PHASE_VOCAB, PHASE_TRAIN, PHASE_SAVE):
            print(f"phase {phase}: {stats.phase_seconds.get(phase, 0.0):.2f} s")
        print(f"rate: {stats.rate:.0f} triples/s")
        payload = stats.to_dict()
        payload["parse"] = {"lines": parse_stats.lines, "triples": parse_stats.triples}
        print(json.dumps(payload, sort_keys=True))


if __name__ == "__main__":
    main()
