"""Triple plausibility scoring on top of trained embeddings.

Two scorer families share one interface: an analogy counter that checks how
many known facts with the same predicate are vector-parallel to the query,
and a learned recurrent classifier over the embedding sequence.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import DegenerateVocabulary, EmptyPredicate
from .graph import GraphIndex, Vocabulary
from .lstm import AdamConfig, AdamState, NeuralScorer, bce_loss_and_grads

SUBJECT_POSITION = 0
OBJECT_POSITION = 2

# how often a sampled negative may collide with a known fact before we keep it
NEGATIVE_RETRIES = 10


class TripleScorer(Protocol):
    def score(self, subject: int, predicate: int, obj: int) -> float:
        ...

    def score_candidates(
        self, triple: tuple[int, int, int], position: int, candidates: np.ndarray
    ) -> np.ndarray:
        ...


def default_epsilon(vectors: np.ndarray, entity_ids: np.ndarray | None = None) -> float:
    """Tolerance radius: a tenth of the mean entity vector norm."""
    vectors = np.asarray(vectors, dtype=np.float64)
    if entity_ids is not None and len(entity_ids) > 0:
        vectors = vectors[np.asarray(entity_ids)]
    if vectors.size == 0:
        raise DegenerateVocabulary("no vectors to derive a tolerance from")
    return 0.1 * float(np.linalg.norm(vectors, axis=1).mean())


def analogy_score(
    triple: tuple[int, int, int],
    vectors: np.ndarray,
    index: GraphIndex,
    epsilon: float,
    max_comparisons: int | None = None,
    rng=None,
) -> float:
    """Fraction of same-predicate facts whose relation offset matches the query.

    A known fact (s', p, o') votes for the query (s, p, o) when
    ||(v_s' - v_o') - (v_s - v_o)|| <= epsilon. The query triple is not
    excluded when it is itself a known fact.
    """
    s, p, o = triple
    rows = index.predicate_triples(p)
    if len(rows) == 0:
        raise EmptyPredicate(f"no known facts with predicate id {p}")
    if max_comparisons is not None and len(rows) > max_comparisons:
        rng = np.random.default_rng(rng)
        rows = rows[rng.choice(len(rows), size=max_comparisons, replace=False)]
    vectors = np.asarray(vectors, dtype=np.float64)
    offsets = vectors[rows[:, 0]] - vectors[rows[:, 2]]
    diffs = offsets - (vectors[s] - vectors[o])
    dists = np.sqrt(np.einsum("ij,ij->i", diffs, diffs))
    return float(np.count_nonzero(dists <= epsilon)) / len(rows)


class AnalogyScorer:
    """Vectorized analogy counting against a fixed fact index."""

    def __init__(
        self,
        vectors: np.ndarray,
        index: GraphIndex,
        epsilon: float,
        max_comparisons: int | None = None,
        rng=None,
    ):
        self.vectors = np.asarray(vectors, dtype=np.float64)
        self.index = index
        self.epsilon = float(epsilon)
        self.max_comparisons = max_comparisons
        self._rng = np.random.default_rng(rng)

    def score(self, subject: int, predicate: int, obj: int) -> float:
        return analogy_score(
            (subject, predicate, obj),
            self.vectors,
            self.index,
            self.epsilon,
            self.max_comparisons,
            self._rng,
        )

    def score_candidates(self, triple, position, candidates):
        s, p, o = triple
        rows = self.index.predicate_triples(p)
        if len(rows) == 0:
            raise EmptyPredicate(f"no known facts with predicate id {p}")
        if self.max_comparisons is not None and len(rows) > self.max_comparisons:
            rows = rows[
                self._rng.choice(len(rows), size=self.max_comparisons, replace=False)
            ]
        offsets = self.vectors[rows[:, 0]] - self.vectors[rows[:, 2]]
        candidates = np.asarray(candidates)
        if position == SUBJECT_POSITION:
            queries = self.vectors[candidates] - self.vectors[o][None, :]
        elif position == OBJECT_POSITION:
            queries = self.vectors[s][None, :] - self.vectors[candidates]
        else:
            raise ValueError(f"cannot corrupt position {position}")
        scores = np.empty(len(candidates), dtype=np.float64)
        # chunked pairwise distances keep the [m, n] block small
        chunk = max(1, 2_000_000 // max(len(rows), 1))
        for start in range(0, len(candidates), chunk):
            block = queries[start : start + chunk]
            diffs = offsets[None, :, :] - block[:, None, :]
            dists = np.sqrt(np.einsum("mnd,mnd->mn", diffs, diffs))
            scores[start : start + chunk] = (
                np.count_nonzero(dists <= self.epsilon, axis=1) / len(rows)
            )
        return scores


class NeuralTripleScorer:
    """Adapts the recurrent classifier to the candidate-scoring interface."""

    def __init__(self, scorer: NeuralScorer, vectors: np.ndarray, batch_size: int = 4096):
        self.scorer = scorer
        self.vectors = np.asarray(vectors, dtype=np.float64)
        self.batch_size = int(batch_size)

    def _sequences(self, triples: np.ndarray) -> np.ndarray:
        return self.vectors[triples]  # [batch, 3, dim]

    def score(self, subject: int, predicate: int, obj: int) -> float:
        return self.scorer.forward(self._sequences(np.array([[subject, predicate, obj]]))[0])

    def score_candidates(self, triple, position, candidates):
        candidates = np.asarray(candidates)
        triples = np.tile(np.asarray(triple, dtype=np.int64), (len(candidates), 1))
        triples[:, position] = candidates
        scores = np.empty(len(candidates), dtype=np.float64)
        for start in range(0, len(candidates), self.batch_size):
            block = triples[start : start + self.batch_size]
            scores[start : start + self.batch_size] = self.scorer.forward_batch(
                self._sequences(block)
            )
        return scores


def make_negative(
    index: GraphIndex,
    vocabulary: Vocabulary,
    rng,
    strategy: str = "corrupt",
    positive: tuple[int, int, int] | None = None,
) -> tuple[int, int, int]:
    """Sample one triple assumed false.

    "random" draws predicate and both entities uniformly; "corrupt" replaces
    the subject or object of ``positive`` (fair coin) with a uniform entity.
    Collisions with known facts are resampled a bounded number of times and
    then accepted, so the call always terminates.
    """
    entities = vocabulary.entity_ids()
    if len(entities) == 0:
        raise DegenerateVocabulary("no entities to sample from")
    if strategy == "random":
        relations = vocabulary.relation_ids()
        if len(relations) == 0:
            raise DegenerateVocabulary("no relations to sample from")
        for _ in range(NEGATIVE_RETRIES + 1):
            cand = (
                int(entities[rng.integers(len(entities))]),
                int(relations[rng.integers(len(relations))]),
                int(entities[rng.integers(len(entities))]),
            )
            if cand not in index.triple_set:
                return cand
        return cand
    if strategy == "corrupt":
        if positive is None:
            raise ValueError("corrupt strategy needs a positive triple")
        s, p, o = positive
        for _ in range(NEGATIVE_RETRIES + 1):
            replacement = int(entities[rng.integers(len(entities))])
            if rng.integers(2) == 0:
                cand = (replacement, p, o)
            else:
                cand = (s, p, replacement)
            if cand not in index.triple_set:
                return cand
        return cand
    raise ValueError(f"unknown negative strategy {strategy!r}")


def make_negatives(
    index: GraphIndex,
    vocabulary: Vocabulary,
    rng,
    strategy: str,
    positives: np.ndarray,
) -> np.ndarray:
    """One negative per positive row, as an [n, 3] id array."""
    out = np.empty((len(positives), 3), dtype=np.int64)
    for i, row in enumerate(positives):
        out[i] = make_negative(index, vocabulary, rng, strategy, tuple(int(x) for x in row))
    return out


@dataclass
class ScorerTrainConfig:
    epochs: int = 100
    batch_size: int = 128
    lr: float = 1e-3
    strategy: str = "corrupt"
    seed: int = 1

    def validate(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if self.strategy not in ("random", "corrupt"):
            raise ValueError(f"unknown negative strategy {self.strategy!r}")


def train_neural_scorer(
    vectors: np.ndarray,
    index: GraphIndex,
    vocabulary: Vocabulary,
    config: ScorerTrainConfig | None = None,
) -> tuple[NeuralScorer, list[float]]:
    """Fit the recurrent classifier on known facts vs sampled negatives.

    Embeddings stay frozen; only classifier weights move. Negatives are
    redrawn every epoch. Returns the scorer and per-epoch mean losses.
    """
    config = config or ScorerTrainConfig()
    config.validate()
    vectors = np.asarray(vectors, dtype=np.float64)
    positives = index.triples
    if len(positives) == 0:
        raise ValueError("no facts to train on")

    seq = np.random.SeedSequence(config.seed)
    init_seq, sample_seq = seq.spawn(2)
    scorer = NeuralScorer.initialize(vectors.shape[1], np.random.default_rng(init_seq))
    adam = AdamState(scorer.params, AdamConfig(lr=config.lr))
    rng = np.random.default_rng(sample_seq)

    losses: list[float] = []
    for _epoch in range(config.epochs):
        negatives = make_negatives(index, vocabulary, rng, config.strategy, positives)
        triples = np.concatenate([positives, negatives], axis=0)
        labels = np.concatenate(
            [np.ones(len(positives)), np.zeros(len(negatives))]
        )
        order = rng.permutation(len(triples))
        epoch_loss = 0.0
        for start in range(0, len(order), config.batch_size):
            batch = order[start : start + config.batch_size]
            inputs = vectors[triples[batch]]
            loss, grads = bce_loss_and_grads(scorer, inputs, labels[batch])
            adam.step(scorer.params, grads)
            epoch_loss += loss * len(batch)
        losses.append(epoch_loss / len(order))
    return scorer, losses
