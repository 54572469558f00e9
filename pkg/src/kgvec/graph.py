"""Vocabulary interning, corpus encoding, and the indices the scorers query."""

from __future__ import annotations

from collections import Counter, defaultdict
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import EmptyCorpus

ROLE_ENTITY = 1
ROLE_RELATION = 2

RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
DCT_SUBJECT = "http://purl.org/dc/terms/subject"
DEFAULT_TYPE_PREDICATES = (RDF_TYPE, DCT_SUBJECT)


class Triple(NamedTuple):
    subject: int
    predicate: int
    object: int


class Vocabulary:
    """Bidirectional URI <-> dense token-id map with pre-filter frequencies.

    Token ids are assigned by first appearance in the stream, so identical
    input bytes always produce identical assignments.
    """

    def __init__(self, uris: Sequence[str], frequencies, roles, min_count: int = 1):
        self.uris = list(uris)
        self.index = {uri: i for i, uri in enumerate(self.uris)}
        self.frequencies = np.asarray(frequencies, dtype=np.int64)
        self.roles = np.asarray(roles, dtype=np.uint8)
        self.min_count = int(min_count)
        if len(self.uris) != len(self.frequencies) or len(self.uris) != len(self.roles):
            raise ValueError("uris, frequencies and roles must align")

    def __len__(self) -> int:
        return len(self.uris)

    def __contains__(self, uri: str) -> bool:
        return uri in self.index

    def id_of(self, uri: str) -> int:
        return self.index[uri]

    def uri_of(self, token_id: int) -> str:
        return self.uris[token_id]

    def entity_ids(self) -> np.ndarray:
        return np.flatnonzero(self.roles & ROLE_ENTITY)

    def relation_ids(self) -> np.ndarray:
        return np.flatnonzero(self.roles & ROLE_RELATION)

    def save(self, path) -> None:
        """Write the sidecar: one ``<token-id>\\t<frequency>\\t<uri>`` line per token."""
        with open(path, "w", encoding="utf-8") as out:
            for i, uri in enumerate(self.uris):
                out.write(f"{i}\t{self.frequencies[i]}\t{uri}\n")

    @classmethod
    def load(cls, path, min_count: int = 1) -> "Vocabulary":
        uris, freqs = [], []
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                _tid, freq, uri = line.rstrip("\n").split("\t", 2)
                uris.append(uri)
                freqs.append(int(freq))
        return cls(uris, freqs, np.zeros(len(uris), dtype=np.uint8), min_count)


def build_vocabulary(
    raw_triples: Sequence[tuple[str, str, str]], min_count: int = 1
) -> Vocabulary:
    """Intern tokens occurring at least ``min_count`` times.

    Frequencies reflect pre-filter occurrences (a token in two positions of
    one triple counts twice). Ids follow first appearance among retained
    tokens, scanning subject, predicate, object within each triple.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    if not raw_triples:
        raise EmptyCorpus("no triples in input")

    counts: Counter[str] = Counter()
    roles: dict[str, int] = defaultdict(int)
    for s, p, o in raw_triples:
        counts[s] += 1
        counts[p] += 1
        counts[o] += 1
        roles[s] |= ROLE_ENTITY
        roles[p] |= ROLE_RELATION
        roles[o] |= ROLE_ENTITY

    uris: list[str] = []
    seen: set[str] = set()
    for triple in raw_triples:
        for token in triple:
            if token not in seen and counts[token] >= min_count:
                seen.add(token)
                uris.append(token)

    frequencies = np.fromiter((counts[u] for u in uris), dtype=np.int64, count=len(uris))
    role_flags = np.fromiter((roles[u] for u in uris), dtype=np.uint8, count=len(uris))
    return Vocabulary(uris, frequencies, role_flags, min_count)


def encode_corpus(
    raw_triples: Iterable[tuple[str, str, str]], vocabulary: Vocabulary
) -> list[Triple]:
    """Map raw URI triples to interned ids, dropping triples with filtered tokens.

    Also marks entity/relation roles for the tokens it passes through, so a
    vocabulary reconstructed from a model file picks up roles from the data.
    """
    index = vocabulary.index
    roles = vocabulary.roles
    encoded: list[Triple] = []
    for s, p, o in raw_triples:
        si = index.get(s)
        pi = index.get(p)
        oi = index.get(o)
        if si is None or pi is None or oi is None:
            continue
        roles[si] |= ROLE_ENTITY
        roles[pi] |= ROLE_RELATION
        roles[oi] |= ROLE_ENTITY
        encoded.append(Triple(si, pi, oi))
    return encoded


class GraphIndex:
    """Frozen query structures over an encoded corpus.

    After construction everything is read-only: by-predicate triple lists,
    per-subject characteristic sets (all (predicate, object) pairs), their
    restriction to type/category predicates, and an O(1) membership set.
    """

    def __init__(self, triples: Sequence[Triple], type_predicates: Iterable[int] = ()):
        arr = np.asarray(triples, dtype=np.int64).reshape(-1, 3)
        self.triples = arr
        self.type_predicates = frozenset(int(p) for p in type_predicates)

        by_predicate: dict[int, list[int]] = defaultdict(list)
        characteristics: dict[int, set[tuple[int, int]]] = defaultdict(set)
        type_categories: dict[int, set[tuple[int, int]]] = defaultdict(set)
        for row, (s, p, o) in enumerate(arr.tolist()):
            by_predicate[p].append(row)
            characteristics[s].add((p, o))
            if p in self.type_predicates:
                type_categories[s].add((p, o))

        self.by_predicate = {
            p: np.asarray(rows, dtype=np.int64) for p, rows in by_predicate.items()
        }
        self.characteristics = {s: frozenset(c) for s, c in characteristics.items()}
        self.type_categories = {s: frozenset(c) for s, c in type_categories.items()}
        self.triple_set = frozenset(map(tuple, arr.tolist()))

    def __len__(self) -> int:
        return int(self.triples.shape[0])

    def __contains__(self, triple) -> bool:
        s, p, o = triple
        return (int(s), int(p), int(o)) in self.triple_set

    def characteristics_of(self, entity: int) -> frozenset:
        return self.characteristics.get(int(entity), frozenset())

    def type_categories_of(self, entity: int) -> frozenset:
        return self.type_categories.get(int(entity), frozenset())

    def predicate_rows(self, predicate: int) -> np.ndarray:
        """Row indices of triples using ``predicate`` (empty array if none)."""
        return self.by_predicate.get(int(predicate), np.empty(0, dtype=np.int64))

    def predicate_triples(self, predicate: int) -> np.ndarray:
        """The [n, 3] id rows of triples using ``predicate``."""
        return self.triples[self.predicate_rows(predicate)]


def build_index(
    triples: Sequence[Triple], type_predicates: Iterable[int] = ()
) -> GraphIndex:
    return GraphIndex(triples, type_predicates)


def resolve_type_predicates(vocabulary: Vocabulary, uris: Iterable[str]) -> list[int]:
    """Token ids for the type/category predicate URIs present in the vocabulary."""
    return [vocabulary.id_of(u) for u in uris if u in vocabulary]
