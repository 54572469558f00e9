#!/usr/bin/env python
"""Generate a synthetic N-Triples corpus.

Families: "typed" (class blocks, hub objects, rdf:type and dct:subject
triples), "random" (uniform edges plus optional types), "clusters" (two
disconnected communities, handy for embedding sanity checks) and "uniform"
(large streamed corpus for throughput runs).
"""

import argparse

from kgvec.synth import (
    random_graph,
    two_cluster_graph,
    typed_graph,
    write_ntriples,
    write_uniform_corpus,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out", help="N-Triples file to write")
    ap.add_argument(
        "--family",
        choices=["typed", "random", "clusters", "uniform"],
        default="typed",
    )
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--entities", type=int, default=950)
    ap.add_argument("--relations", type=int, default=12)
    ap.add_argument("--facts", type=int, default=2600)
    args = ap.parse_args()

    if args.family == "uniform":
        write_uniform_corpus(
            args.out,
            args.facts,
            n_entities=args.entities,
            n_relations=args.relations,
            seed=args.seed,
        )
        print(f"wrote {args.facts} triples to {args.out}")
        return

    if args.family == "typed":
        triples = typed_graph(
            seed=args.seed,
            n_entities=args.entities,
            n_relations=args.relations,
            n_facts=args.facts,
        )
    elif args.family == "random":
        triples = random_graph(
            seed=args.seed,
            n_entities=args.entities,
            n_relations=args.relations,
            n_triples=args.facts,
        )
    else:
        triples, members_a, members_b = two_cluster_graph(seed=args.seed)
        print(f"cluster sizes: {len(members_a)} / {len(members_b)}")
    write_ntriples(args.out, triples)
    print(f"wrote {len(triples)} triples to {args.out}")


if __name__ == "__main__":
    main()
