"""Knowledge-graph embeddings via skip-gram over triples, with analogy and
recurrent triple scoring, filtered link-prediction evaluation, and
neighbour-similarity quality metrics."""

from .errors import (
    DegenerateSplit,
    DegenerateVocabulary,
    EmptyCorpus,
    EmptyPredicate,
    FlagError,
    FormatError,
    InsufficientCandidates,
    KgvecError,
    NumericalDivergence,
    SkippedTriple,
    VocabularyTooLarge,
)
from .evaluation import (
    EvalConfig,
    EvaluationReport,
    RankResult,
    SplitSpec,
    evaluate,
    hits_at_k,
    rank_candidates,
    split_dataset,
)
from .graph import (
    DEFAULT_TYPE_PREDICATES,
    GraphIndex,
    Triple,
    Vocabulary,
    build_index,
    build_vocabulary,
    encode_corpus,
    resolve_type_predicates,
)
from .lstm import AdamConfig, AdamState, NeuralScorer, load_scorer, save_scorer
from .metrics import (
    MetricTrace,
    NeighbourList,
    jaccard,
    metric_trace,
    nearest_neighbours,
    nst,
    tct,
)
from .model import EmbeddingModel, load_model, save_model
from .ntriples import ParseStats, parse_ntriples
from .projection import ProjectionMatrix, pca_project
from .scoring import (
    AnalogyScorer,
    NeuralTripleScorer,
    ScorerTrainConfig,
    analogy_score,
    default_epsilon,
    make_negative,
    train_neural_scorer,
)
from .trainer import ThroughputStats, TrainConfig, sgns_loss, softmax_probability, train

__version__ = "0.1.0"
