"""Link-prediction harness: seeded train/test split, corrupted-entity
ranking under the filtered protocol, and Hits@K report emission.

Ranking substitutes every entity into one position of a test triple and asks
where the true entity lands once candidates that form other known facts are
removed. Subject and object corruption are both run by default and pooled.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSplit, EmptyPredicate, SkippedTriple
from .graph import GraphIndex, Vocabulary, build_index
from .model import EmbeddingModel
from .scoring import (
    OBJECT_POSITION,
    SUBJECT_POSITION,
    AnalogyScorer,
    NeuralTripleScorer,
    ScorerTrainConfig,
    default_epsilon,
    train_neural_scorer,
)

DEFAULT_KS = (1, 3, 10)


@dataclass
class SplitSpec:
    fraction: float = 0.9
    seed: int | np.random.SeedSequence = 1
    filter_unseen: bool = True
    # filled by split_dataset
    train_indices: np.ndarray | None = None
    test_indices: np.ndarray | None = None
    dropped_unseen: int = 0

    def validate(self) -> None:
        if not 0.0 < self.fraction < 1.0:
            raise ValueError("train fraction must lie strictly between 0 and 1")


def split_dataset(corpus: np.ndarray, spec: SplitSpec | None = None):
    """Seeded uniform partition into train and test triple arrays.

    Test triples using a token absent from train cannot be ranked; they are
    dropped here (counted on the spec) unless filter_unseen is off.
    """
    spec = spec or SplitSpec()
    spec.validate()
    corpus = np.asarray(corpus, dtype=np.int64)
    n = len(corpus)
    if n < 10:
        raise DegenerateSplit(f"need at least 10 triples to split, have {n}")
    n_train = int(round(n * spec.fraction))
    perm = np.random.default_rng(spec.seed).permutation(n)
    spec.train_indices = np.sort(perm[:n_train])
    spec.test_indices = np.sort(perm[n_train:])
    train = corpus[spec.train_indices]
    test = corpus[spec.test_indices]
    if spec.filter_unseen and len(test) > 0:
        seen = np.zeros(int(corpus.max()) + 1, dtype=bool)
        seen[train.ravel()] = True
        keep = seen[test].all(axis=1)
        spec.dropped_unseen = int(np.count_nonzero(~keep))
        test = test[keep]
    if len(train) == 0 or len(test) == 0:
        raise DegenerateSplit("split left train or test empty")
    return train, test


@dataclass
class RankResult:
    triple: tuple[int, int, int]
    position: int
    rank: int
    candidate_count: int

    def __post_init__(self):
        if not 1 <= self.rank <= self.candidate_count:
            raise ValueError(
                f"rank {self.rank} outside [1, {self.candidate_count}]"
            )


def rank_candidates(
    scorer,
    triple: tuple[int, int, int],
    position: int,
    entity_ids: np.ndarray,
    index: GraphIndex,
    filtered: bool = True,
) -> RankResult:
    """1-based rank of the true entity among substitution candidates.

    Filtered protocol: a candidate is removed when swapping it in yields a
    triple already present in the graph, the test triple itself excepted.
    Candidates are ordered by score descending, then token-id ascending.
    """
    triple = tuple(int(x) for x in triple)
    if position not in (SUBJECT_POSITION, OBJECT_POSITION):
        raise ValueError(f"cannot corrupt position {position}")
    true_id = triple[position]
    entity_ids = np.asarray(entity_ids, dtype=np.int64)
    if true_id not in entity_ids:
        raise SkippedTriple(f"true entity {true_id} is not a ranking candidate")

    if filtered:
        keep = np.ones(len(entity_ids), dtype=bool)
        variant = list(triple)
        for k, cand in enumerate(entity_ids):
            if cand == true_id:
                continue
            variant[position] = int(cand)
            if tuple(variant) in index.triple_set:
                keep[k] = False
        candidates = entity_ids[keep]
    else:
        candidates = entity_ids

    scores = np.asarray(scorer.score_candidates(triple, position, candidates))
    true_pos = int(np.flatnonzero(candidates == true_id)[0])
    true_score = scores[true_pos]
    rank = 1
    rank += int(np.count_nonzero(scores > true_score))
    rank += int(np.count_nonzero((scores == true_score) & (candidates < true_id)))
    return RankResult(triple, position, rank, len(candidates))


@dataclass
class EvaluationReport:
    hits: dict[int, float]
    mean_rank: float
    evaluated: int
    skipped: int
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        values = [self.hits[k] for k in sorted(self.hits)]
        if any(not 0.0 <= v <= 100.0 for v in values):
            raise ValueError("hits percentages must lie in [0,100]")
        if any(a > b for a, b in zip(values, values[1:])):
            raise ValueError("hits@k must be non-decreasing in k")

    def to_json(self) -> str:
        payload = {f"hits@{k}": self.hits[k] for k in sorted(self.hits)}
        payload["mean_rank"] = self.mean_rank
        payload["skipped"] = self.skipped
        payload["config"] = self.config
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_table(self) -> str:
        lines = [f"hits@{k:<3d} {self.hits[k]:6.2f}%" for k in sorted(self.hits)]
        lines.append(f"mean rank {self.mean_rank:.2f} over {self.evaluated} rankings")
        if self.skipped:
            lines.append(f"skipped {self.skipped}")
        return "\n".join(lines)


def hits_at_k(
    results: list[RankResult],
    ks=DEFAULT_KS,
    skipped: int = 0,
    config: dict | None = None,
) -> EvaluationReport:
    """Percentage of results ranked at or above each cutoff, pooled."""
    if not results:
        raise ValueError("no rank results to aggregate")
    ranks = np.array([r.rank for r in results])
    hits = {int(k): 100.0 * int(np.count_nonzero(ranks <= k)) / len(ranks) for k in ks}
    return EvaluationReport(
        hits=hits,
        mean_rank=float(ranks.mean()),
        evaluated=len(results),
        skipped=skipped,
        config=config or {},
    )


class RandomScorer:
    """Uniform scores; rank becomes uniform on the candidate count."""

    def __init__(self, rng=None):
        self._rng = np.random.default_rng(rng)

    def score(self, subject: int, predicate: int, obj: int) -> float:
        return float(self._rng.random())

    def score_candidates(self, triple, position, candidates):
        return self._rng.random(len(candidates))


@dataclass
class EvalConfig:
    scorer: str = "analogy"  # analogy | lstm | random
    negatives: str = "corrupt"
    fraction: float = 0.9
    seed: int = 1
    epsilon: float | None = None
    max_comparisons: int | None = None
    corrupt_subject: bool = True  # False ranks object replacements only
    filtered: bool = True
    ks: tuple = DEFAULT_KS
    scorer_epochs: int = 100
    scorer_batch: int = 128

    def validate(self) -> None:
        if self.scorer not in ("analogy", "lstm", "random"):
            raise ValueError(f"unknown scorer {self.scorer!r}")
        if self.negatives not in ("random", "corrupt"):
            raise ValueError(f"unknown negative strategy {self.negatives!r}")


def evaluate_with_scorer(
    model: EmbeddingModel,
    corpus: np.ndarray,
    config: EvalConfig | None = None,
    vocabulary: Vocabulary | None = None,
) -> tuple[EvaluationReport, object]:
    """Split, fit the chosen scorer on train facts, rank the test triples.

    The scorer only ever sees train triples; the filtered rule consults the
    whole graph. Unrankable triples (unseen tokens, predicates without train
    facts) are counted as skipped. Returns the report and the scorer used.
    """
    config = config or EvalConfig()
    config.validate()
    vocabulary = vocabulary or model.vocabulary
    corpus = np.asarray(corpus, dtype=np.int64)

    seq = np.random.SeedSequence(config.seed)
    split_seq, scorer_seq = seq.spawn(2)
    spec = SplitSpec(fraction=config.fraction, seed=split_seq)
    train, test = split_dataset(corpus, spec)

    train_index = build_index(train)
    full_index = build_index(corpus)
    vectors = np.asarray(model.published(), dtype=np.float64)
    entity_ids = vocabulary.entity_ids()

    if config.scorer == "analogy":
        epsilon = config.epsilon
        if epsilon is None:
            epsilon = default_epsilon(vectors, entity_ids)
        scorer = AnalogyScorer(
            vectors, train_index, epsilon, config.max_comparisons, scorer_seq
        )
    elif config.scorer == "lstm":
        neural, _losses = train_neural_scorer(
            vectors,
            train_index,
            vocabulary,
            ScorerTrainConfig(
                epochs=config.scorer_epochs,
                batch_size=config.scorer_batch,
                strategy=config.negatives,
                seed=scorer_seq.generate_state(1)[0],
            ),
        )
        scorer = NeuralTripleScorer(neural, vectors)
    else:
        scorer = RandomScorer(scorer_seq)

    positions = [OBJECT_POSITION]
    if config.corrupt_subject:
        positions = [SUBJECT_POSITION, OBJECT_POSITION]

    results: list[RankResult] = []
    skipped = spec.dropped_unseen
    for row in test:
        triple = tuple(int(x) for x in row)
        for position in positions:
            try:
                results.append(
                    rank_candidates(
                        scorer, triple, position, entity_ids, full_index, config.filtered
                    )
                )
            except (SkippedTriple, EmptyPredicate):
                skipped += 1
    if not results:
        raise DegenerateSplit("every test ranking was skipped")

    echo = {
        "scorer": config.scorer,
        "negatives": config.negatives,
        "seed": config.seed,
        "fraction": config.fraction,
        "filtered": config.filtered,
        "corrupt_subject": config.corrupt_subject,
        "train_triples": int(len(train)),
        "test_triples": int(len(test)),
    }
    return hits_at_k(results, config.ks, skipped=skipped, config=echo), scorer


def evaluate(
    model: EmbeddingModel,
    corpus: np.ndarray,
    config: EvalConfig | None = None,
    vocabulary: Vocabulary | None = None,
) -> EvaluationReport:
    report, _scorer = evaluate_with_scorer(model, corpus, config, vocabulary)
    return report
