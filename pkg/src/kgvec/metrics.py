"""Distributional quality metrics: neighbour similarity over characteristic
sets (NST) and its restriction to type/category predicates (TCT), plus the
incremental partial-trace variant.

Both metrics ask the same question: do entities that are close in the vector
space also share graph-level descriptions? Scores are means of Jaccard
overlaps, so they live in [0,1] by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InsufficientCandidates
from .graph import GraphIndex
from .model import EmbeddingModel


def jaccard(set_a, set_b) -> float:
    """|A∩B| / |A∪B|, with both-empty defined as 0.

    Two entities without any recorded characteristics are treated as
    unrelated, not identical.
    """
    set_a = frozenset(set_a)
    set_b = frozenset(set_b)
    union = len(set_a | set_b)
    if union == 0:
        return 0.0
    return len(set_a & set_b) / union


@dataclass
class NeighbourList:
    entity: int
    neighbours: list[tuple[int, float]]

    def __post_init__(self):
        sims = [s for _, s in self.neighbours]
        if any(a < b for a, b in zip(sims, sims[1:])):
            raise ValueError("similarities must be non-increasing")
        if any(i == self.entity for i, _ in self.neighbours):
            raise ValueError("query entity may not be its own neighbour")

    def ids(self) -> list[int]:
        return [i for i, _ in self.neighbours]


class NeighbourFinder:
    """Exact linear-scan cosine search over a fixed candidate set.

    Norms are precomputed once; zero-norm vectors get similarity 0 so the
    ordering stays total. Ties break toward the smaller token-id.
    """

    def __init__(self, vectors: np.ndarray, candidate_ids: np.ndarray):
        self.vectors = np.asarray(vectors, dtype=np.float64)
        self.candidate_ids = np.asarray(candidate_ids, dtype=np.int64)
        self._matrix = self.vectors[self.candidate_ids]
        self._norms = np.linalg.norm(self._matrix, axis=1)

    def neighbours(self, entity: int, n: int) -> NeighbourList:
        mask = self.candidate_ids != entity
        ids = self.candidate_ids[mask]
        if len(ids) < n:
            raise InsufficientCandidates(
                f"need {n} neighbour candidates, have {len(ids)}"
            )
        query = self.vectors[entity]
        qnorm = np.linalg.norm(query)
        dots = self._matrix[mask] @ query
        denom = self._norms[mask] * qnorm
        sims = np.divide(dots, denom, out=np.zeros_like(dots), where=denom > 0)
        order = np.lexsort((ids, -sims))[:n]
        return NeighbourList(entity, [(int(ids[k]), float(sims[k])) for k in order])


def nearest_neighbours(
    model: EmbeddingModel,
    entity: int,
    n: int,
    candidate_ids: np.ndarray | None = None,
) -> NeighbourList:
    """Top-n entities by cosine similarity, query excluded."""
    if candidate_ids is None:
        candidate_ids = model.vocabulary.entity_ids()
    return NeighbourFinder(model.published(), candidate_ids).neighbours(entity, n)


def _mean_neighbour_overlap(entities, finder, n, sets_of) -> float:
    """Running mean of Jaccard(description(e), description(neighbour)).

    Kept as a plain ordered summation so independent reimplementations
    accumulate identically.
    """
    total = 0.0
    count = 0
    for entity in entities:
        own = sets_of(int(entity))
        for neighbour_id, _sim in finder.neighbours(int(entity), n).neighbours:
            total += jaccard(own, sets_of(neighbour_id))
            count += 1
    return total / count if count else 0.0


def nst(model: EmbeddingModel, index: GraphIndex, entities, n: int) -> float:
    """Mean Jaccard of characteristic sets between entities and their
    n nearest embedding-space neighbours."""
    finder = NeighbourFinder(model.published(), model.vocabulary.entity_ids())
    return _mean_neighbour_overlap(entities, finder, n, index.characteristics_of)


def tct(model: EmbeddingModel, index: GraphIndex, entities, n: int) -> float:
    """As nst, over type/category pairs only."""
    finder = NeighbourFinder(model.published(), model.vocabulary.entity_ids())
    return _mean_neighbour_overlap(entities, finder, n, index.type_categories_of)


@dataclass
class MetricTrace:
    ordering: list[int]
    values: list[tuple[int, float]] = field(default_factory=list)

    def __post_init__(self):
        prefixes = [i for i, _ in self.values]
        if any(a >= b for a, b in zip(prefixes, prefixes[1:])):
            raise ValueError("prefix lengths must be strictly increasing")
        if any(not 0.0 <= v <= 1.0 for _, v in self.values):
            raise ValueError("partial values must lie in [0,1]")

    @property
    def final_value(self) -> float:
        return self.values[-1][1]


def metric_trace(
    model: EmbeddingModel,
    index: GraphIndex,
    ordering,
    n: int,
    kind: str = "nst",
    stride: int = 1,
) -> MetricTrace:
    """Partial metric values over growing prefixes of ``ordering``.

    The running sum makes each step O(one neighbour search); a row is
    emitted every ``stride`` entities and always at the final prefix.
    """
    if kind == "nst":
        sets_of = index.characteristics_of
    elif kind == "tct":
        sets_of = index.type_categories_of
    else:
        raise ValueError(f"unknown metric kind {kind!r}")
    if stride < 1:
        raise ValueError("stride must be positive")
    ordering = [int(e) for e in ordering]
    if not ordering:
        raise ValueError("entity ordering is empty")

    finder = NeighbourFinder(model.published(), model.vocabulary.entity_ids())
    values: list[tuple[int, float]] = []
    total = 0.0
    for i, entity in enumerate(ordering, start=1):
        own = sets_of(entity)
        for neighbour_id, _sim in finder.neighbours(entity, n).neighbours:
            total += jaccard(own, sets_of(neighbour_id))
        if i % stride == 0 or i == len(ordering):
            values.append((i, total / (n * i)))
    return MetricTrace(ordering, values)


def write_trace(trace: MetricTrace, vocabulary, path) -> None:
    """TSV with header i, entity_uri, partial_value; one row per sample."""
    with open(path, "w", encoding="utf-8") as out:
        out.write("i\tentity_uri\tpartial_value\n")
        for i, value in trace.values:
            uri = vocabulary.uri_of(trace.ordering[i - 1])
            out.write(f"{i}\t{uri}\t{value:.10f}\n")
