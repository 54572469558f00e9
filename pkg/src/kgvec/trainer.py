"""Skip-gram training over triples treated as three-word sentences.

Every triple expands into the six ordered (center, context) pairs of its
tokens; each pair takes one negative-sampling SGD step. The hot loop runs
through the numba kernel when available (``backend="auto"``); a pure-numpy
reference path with identical semantics exists for tests and tiny corpora.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyCorpus, NumericalDivergence, VocabularyTooLarge
from .graph import Triple, Vocabulary
from .model import EmbeddingModel

PHASE_VOCAB = "vocab-count"
PHASE_TRAIN = "train"
PHASE_SAVE = "save"

try:
    from . import sgns_fast

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    sgns_fast = None
    _HAVE_NUMBA = False


@dataclass
class TrainConfig:
    dim: int = 100
    negative: int = 5
    epochs: int = 5
    alpha: float = 0.025
    alpha_floor: float = 1e-4
    workers: int = 1
    sample_power: float = 0.75
    seed: int = 1
    backend: str = "auto"  # auto | numba | numpy

    def validate(self) -> None:
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.negative < 1:
            raise ValueError(f"negative must be >= 1, got {self.negative}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.alpha <= 0:
            raise ValueError(f"learning rate must be > 0, got {self.alpha}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")
        if self.backend not in ("auto", "numba", "numpy"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass
class ThroughputStats:
    """Wall-clock accounting for the three pipeline phases.

    ``triples`` counts triples processed (epochs x corpus size), so the rate
    is comparable across epoch settings.
    """

    triples: int = 0
    phase_seconds: dict = field(default_factory=dict)
    epoch_losses: list = field(default_factory=list)
    pairs_processed: int = 0

    @property
    def rate(self) -> float:
        seconds = self.phase_seconds.get(PHASE_TRAIN, 0.0)
        return self.triples / seconds if seconds > 0 else 0.0

    def to_dict(self) -> dict:
        return {
            "triples": self.triples,
            "phases": dict(self.phase_seconds),
            "rate": self.rate,
            "pairs": self.pairs_processed,
            "epoch_losses": list(self.epoch_losses),
        }


def triple_to_context_pairs(triple) -> list[tuple[int, int]]:
    """The six ordered (center, context) pairs of a length-3 sentence."""
    s, p, o = triple
    return [(s, p), (s, o), (p, s), (p, o), (o, s), (o, p)]


def unigram_probabilities(vocabulary: Vocabulary, power: float = 0.75) -> np.ndarray:
    weights = np.asarray(vocabulary.frequencies, dtype=np.float64) ** power
    total = weights.sum()
    if total <= 0:
        raise EmptyCorpus("vocabulary has no frequency mass")
    return weights / total


def negative_sample(
    vocabulary: Vocabulary,
    rng: np.random.Generator,
    k: int,
    exclude: int | None = None,
    power: float = 0.75,
    max_retries: int = 3,
) -> list[int]:
    """Draw k token ids i.i.d. from the unigram^power distribution.

    Draws equal to ``exclude`` are redrawn up to ``max_retries`` times, then
    kept (a single-token vocabulary can only ever return that token).
    """
    if len(vocabulary) == 0:
        raise EmptyCorpus("empty vocabulary")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    cdf = np.cumsum(unigram_probabilities(vocabulary, power))
    cdf[-1] = 1.0
    draws = np.searchsorted(cdf, rng.random(k), side="right")
    if exclude is not None:
        for _ in range(max_retries):
            mask = draws == exclude
            if not mask.any():
                break
            draws[mask] = np.searchsorted(cdf, rng.random(int(mask.sum())), side="right")
    return [int(x) for x in draws]


def build_unigram_table(
    frequencies: np.ndarray, power: float = 0.75, size: int | None = None
) -> np.ndarray:
    """Quantized unigram^power distribution for O(1) sampling in the kernel."""
    frequencies = np.asarray(frequencies, dtype=np.float64)
    if size is None:
        size = int(min(20_000_000, max(1_000_000, 20 * len(frequencies))))
    weights = frequencies**power
    total = weights.sum()
    if total <= 0:
        raise EmptyCorpus("vocabulary has no frequency mass")
    cdf = np.cumsum(weights) / total
    positions = (np.arange(size) + 0.5) / size
    return np.searchsorted(cdf, positions, side="right").astype(np.int64)


def _softplus(x: np.ndarray) -> np.ndarray:
    # log(1 + e^x), overflow-safe
    return np.logaddexp(0.0, x)


def sgns_loss(model: EmbeddingModel, center, context, negatives) -> float:
    """Negative-sampling surrogate loss for one (center, context) pair."""
    targets = np.asarray([context, *negatives], dtype=np.int64)
    f = model.output_vectors[targets].astype(np.float64) @ model.input_vectors[
        center
    ].astype(np.float64)
    loss = _softplus(-f[0]) + _softplus(f[1:]).sum()
    return float(loss)


def sgns_gradients(model: EmbeddingModel, center, context, negatives):
    """Loss and gradients w.r.t. the pre-update parameters.

    Returns ``(loss, grad_center, grad_rows)`` where grad_rows maps an output
    row id to its accumulated gradient (duplicate negatives accumulate).
    """
    targets = np.asarray([context, *negatives], dtype=np.int64)
    labels = np.zeros(len(targets), dtype=np.float64)
    labels[0] = 1.0
    center_vec = model.input_vectors[center].astype(np.float64)
    out_rows = model.output_vectors[targets].astype(np.float64)

    f = out_rows @ center_vec
    sigma = 1.0 / (1.0 + np.exp(-f))
    loss = float(_softplus(-f[0]) + _softplus(f[1:]).sum())

    coeff = sigma - labels  # dL/df
    grad_center = coeff @ out_rows
    grad_rows: dict[int, np.ndarray] = {}
    for t, c in zip(targets.tolist(), coeff):
        if t in grad_rows:
            grad_rows[t] = grad_rows[t] + c * center_vec
        else:
            grad_rows[t] = c * center_vec
    return loss, grad_center, grad_rows


def train_step(model: EmbeddingModel, center, context, negatives, lr: float) -> float:
    """One SGD step on the surrogate loss; returns the pre-update loss."""
    if lr <= 0:
        raise ValueError(f"learning rate must be > 0, got {lr}")
    loss, grad_center, grad_rows = sgns_gradients(model, center, context, negatives)
    if not np.isfinite(loss) or not np.isfinite(grad_center).all():
        raise NumericalDivergence(
            f"non-finite loss/gradient at pair ({center}, {context})"
        )
    dtype = model.input_vectors.dtype
    model.input_vectors[center] -= (lr * grad_center).astype(dtype)
    for t, g in grad_rows.items():
        model.output_vectors[t] -= (lr * g).astype(dtype)
    return loss


def softmax_probability(model: EmbeddingModel, u, u_prime) -> float:
    """Exact softmax p(u | u') over the full vocabulary (diagnostics only).

    Guarded to small vocabularies; computed with max-subtraction.
    """
    if model.size > 10_000:
        raise VocabularyTooLarge(
            f"exact softmax limited to 10000 tokens, model has {model.size}"
        )
    scores = model.output_vectors.astype(np.float64) @ model.input_vectors[
        u_prime
    ].astype(np.float64)
    scores -= scores.max()
    exp = np.exp(scores)
    return float(exp[u] / exp.sum())


def _numpy_epoch(
    triples: np.ndarray,
    model: EmbeddingModel,
    cdf: np.ndarray,
    config: TrainConfig,
    pairs_before: int,
    total_pairs: int,
    rng: np.random.Generator,
    epoch: int,
) -> tuple[float, int]:
    k = config.negative
    loss_sum = 0.0
    local = 0
    for row in range(triples.shape[0]):
        triple = triples[row]
        for ci in range(3):
            center = int(triple[ci])
            for cj in range(3):
                if cj == ci:
                    continue
                context = int(triple[cj])
                progress = (pairs_before + local) / total_pairs
                lr = max(config.alpha * (1.0 - progress), config.alpha_floor)
                local += 1
                draws = np.searchsorted(cdf, rng.random(k), side="right")
                for _ in range(3):
                    mask = draws == context
                    if not mask.any():
                        break
                    draws[mask] = np.searchsorted(
                        cdf, rng.random(int(mask.sum())), side="right"
                    )
                try:
                    loss_sum += train_step(model, center, context, draws.tolist(), lr)
                except NumericalDivergence as err:
                    raise NumericalDivergence(
                        f"epoch {epoch}, triple {row}: {err}"
                    ) from None
    return loss_sum, local


def train(
    corpus,
    vocabulary: Vocabulary,
    config: TrainConfig,
) -> tuple[EmbeddingModel, ThroughputStats]:
    """Train input/output matrices over the encoded corpus.

    Runs ``epochs`` passes; each triple expands to its six context pairs and
    each pair takes one negative-sampling step. The learning rate decays
    linearly over the total pair count down to ``alpha_floor``.
    """
    config.validate()
    triples = np.asarray(corpus, dtype=np.int64).reshape(-1, 3)
    n = triples.shape[0]
    if n == 0:
        raise EmptyCorpus("cannot train on an empty corpus")

    seed_root = np.random.SeedSequence(config.seed)
    init_seq, sample_seq = seed_root.spawn(2)
    model = EmbeddingModel.initialize(
        vocabulary, config.dim, rng=np.random.default_rng(init_seq)
    )

    backend = config.backend
    if backend == "auto":
        backend = "numba" if _HAVE_NUMBA else "numpy"
    if backend == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")

    stats = ThroughputStats(triples=n * config.epochs)
    total_pairs = 6 * n * config.epochs
    started = time.perf_counter()

    if backend == "numba":
        _train_numba(triples, model, config, sample_seq, total_pairs, stats)
    else:
        _train_numpy(triples, model, config, sample_seq, total_pairs, stats)

    stats.phase_seconds[PHASE_TRAIN] = time.perf_counter() - started
    model.check_finite("after training")
    return model, stats


def _train_numpy(triples, model, config, sample_seq, total_pairs, stats):
    cdf = np.cumsum(unigram_probabilities(model.vocabulary, config.sample_power))
    cdf[-1] = 1.0
    rng = np.random.default_rng(sample_seq)
    n = triples.shape[0]
    for epoch in range(config.epochs):
        loss_sum, pairs = _numpy_epoch(
            triples, model, cdf, config, 6 * n * epoch, total_pairs, rng, epoch
        )
        stats.epoch_losses.append(loss_sum / pairs)
        stats.pairs_processed += pairs


def _train_numba(triples, model, config, sample_seq, total_pairs, stats):
    import numba

    table = build_unigram_table(model.vocabulary.frequencies, config.sample_power)
    # shard count stays at the requested worker count so results do not
    # depend on how many hardware threads happen to exist
    workers = config.workers
    numba.set_num_threads(max(1, min(workers, numba.config.NUMBA_NUM_THREADS)))

    n = triples.shape[0]
    epoch_seeds = sample_seq.generate_state(config.epochs, dtype=np.uint64)
    worker_loss = np.zeros(workers, dtype=np.float64)
    worker_pairs = np.zeros(workers, dtype=np.int64)
    for epoch in range(config.epochs):
        sgns_fast.sgns_epoch(
            triples,
            model.input_vectors,
            model.output_vectors,
            table,
            config.negative,
            config.alpha,
            config.alpha_floor,
            float(6 * n * epoch),
            float(total_pairs),
            workers,
            epoch_seeds[epoch],
            worker_loss,
            worker_pairs,
        )
        pairs = int(worker_pairs.sum())
        stats.epoch_losses.append(float(worker_loss.sum()) / pairs)
        stats.pairs_processed += pairs
        try:
            model.check_finite(f"epoch {epoch}")
        except NumericalDivergence as err:
            raise NumericalDivergence(str(err)) from None
