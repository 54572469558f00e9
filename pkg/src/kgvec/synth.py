"""Seeded synthetic knowledge graphs for experiments and tests.

Three families: a class-typed graph whose predicates have domains and ranges
(link prediction has signal to find), a two-community graph (distributional
clustering), and unstructured uniform graphs (oracles, throughput).
Generators return bare URI strings, the same convention the parser emits;
angle brackets appear only in serialized N-Triples text.
"""

from __future__ import annotations

import numpy as np

from .graph import DCT_SUBJECT, RDF_TYPE

BASE = "http://example.org"


def entity_uri(i: int) -> str:
    return f"{BASE}/entity/{i}"


def relation_uri(i: int) -> str:
    return f"{BASE}/relation/{i}"


def class_uri(i: int) -> str:
    return f"{BASE}/class/{i}"


def category_uri(i: int) -> str:
    return f"{BASE}/category/{i}"


def _power_weights(n: int, exponent: float = 1.0) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1) ** exponent
    return w / w.sum()


def typed_graph(
    seed: int,
    n_entities: int = 950,
    n_classes: int = 8,
    n_relations: int = 12,
    n_facts: int = 2600,
    include_types: bool = True,
    category_fraction: float = 0.5,
) -> list[tuple[str, str, str]]:
    """Graph with per-class entity blocks and typed predicates.

    Each relation connects one class block to another; objects inside a
    block follow a power-law popularity, giving the hub structure common in
    real graphs. Type and category triples are appended when requested.
    """
    rng = np.random.default_rng(seed)
    classes = np.arange(n_entities) % n_classes
    blocks = [np.flatnonzero(classes == c) for c in range(n_classes)]

    domains = rng.integers(0, n_classes, size=n_relations)
    ranges = rng.integers(0, n_classes, size=n_relations)
    relation_weights = _power_weights(n_relations, 0.7)

    triples: set[tuple[str, str, str]] = set()
    attempts = 0
    while len(triples) < n_facts and attempts < n_facts * 50:
        attempts += 1
        r = int(rng.choice(n_relations, p=relation_weights))
        dom = blocks[domains[r]]
        rng_block = blocks[ranges[r]]
        s = int(dom[rng.integers(len(dom))])
        o = int(rng.choice(rng_block, p=_power_weights(len(rng_block))))
        if s == o:
            continue
        triples.add((entity_uri(s), relation_uri(r), entity_uri(o)))

    out = sorted(triples)
    if include_types:
        for e in range(n_entities):
            out.append((entity_uri(e), RDF_TYPE, class_uri(int(classes[e]))))
        for e in range(n_entities):
            if rng.random() < category_fraction:
                cat = int(classes[e]) * 2 + int(rng.integers(2))
                out.append((entity_uri(e), DCT_SUBJECT, category_uri(cat)))
    return out


def two_cluster_graph(
    seed: int,
    per_cluster: int = 30,
    facts_per_cluster: int = 200,
    n_relations: int = 3,
):
    """Two disconnected communities with their own predicates and hubs.

    Returns (triples, cluster_a_uris, cluster_b_uris); the URI lists cover
    the member entities of each community.
    """
    rng = np.random.default_rng(seed)
    triples: set[tuple[str, str, str]] = set()
    members: list[list[str]] = []
    for cluster in range(2):
        lo = cluster * per_cluster
        ids = np.arange(lo, lo + per_cluster)
        members.append([entity_uri(int(i)) for i in ids])
        weights = _power_weights(per_cluster, 1.2)
        made = 0
        while made < facts_per_cluster:
            s = int(ids[rng.integers(per_cluster)])
            o = int(rng.choice(ids, p=weights))
            if s == o:
                continue
            r = cluster * n_relations + int(rng.integers(n_relations))
            triple = (entity_uri(s), relation_uri(r), entity_uri(o))
            if triple not in triples:
                triples.add(triple)
                made += 1
    return sorted(triples), members[0], members[1]


def random_graph(
    seed: int,
    n_entities: int = 50,
    n_relations: int = 8,
    n_triples: int = 300,
    typed: bool = True,
) -> list[tuple[str, str, str]]:
    """Uniform unstructured graph, optionally with type/category triples."""
    rng = np.random.default_rng(seed)
    triples: set[tuple[str, str, str]] = set()
    attempts = 0
    while len(triples) < n_triples and attempts < n_triples * 50:
        attempts += 1
        s = int(rng.integers(n_entities))
        o = int(rng.integers(n_entities))
        if s == o:
            continue
        r = int(rng.integers(n_relations))
        triples.add((entity_uri(s), relation_uri(r), entity_uri(o)))
    out = sorted(triples)
    if typed:
        for e in range(n_entities):
            if rng.random() < 0.7:
                out.append((entity_uri(e), RDF_TYPE, class_uri(int(rng.integers(4)))))
            if rng.random() < 0.4:
                out.append(
                    (entity_uri(e), DCT_SUBJECT, category_uri(int(rng.integers(6))))
                )
    return out


def write_ntriples(path, triples) -> None:
    """Serialize bare URI triples as N-Triples statements."""
    with open(path, "w", encoding="utf-8") as out:
        for s, p, o in triples:
            out.write(f"<{s}> <{p}> <{o}> .\n")


def write_uniform_corpus(
    path,
    n_triples: int,
    n_entities: int = 50_000,
    n_relations: int = 200,
    seed: int = 1,
    chunk: int = 100_000,
) -> None:
    """Stream a large uniform corpus to disk without building it in memory."""
    rng = np.random.default_rng(seed)
    with open(path, "w", encoding="utf-8") as out:
        remaining = n_triples
        while remaining > 0:
            size = min(chunk, remaining)
            subs = rng.integers(0, n_entities, size=size)
            rels = rng.integers(0, n_relations, size=size)
            objs = rng.integers(0, n_entities, size=size)
            lines = [
                f"<{entity_uri(s)}> <{relation_uri(r)}> <{entity_uri(o)}> ."
                for s, r, o in zip(subs, rels, objs)
            ]
            out.write("\n".join(lines))
            out.write("\n")
            remaining -= size
