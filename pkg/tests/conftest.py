import numpy as np
import pytest

from kgvec import synth
from kgvec.graph import build_index, build_vocabulary, encode_corpus
from kgvec.model import EmbeddingModel
from kgvec.trainer import TrainConfig, train


@pytest.fixture(scope="session")
def small_raw():
    return synth.typed_graph(
        seed=7, n_entities=120, n_classes=4, n_relations=6, n_facts=500
    )


@pytest.fixture(scope="session")
def small_vocab(small_raw):
    return build_vocabulary(small_raw)


@pytest.fixture(scope="session")
def small_corpus(small_raw, small_vocab):
    return np.asarray(encode_corpus(small_raw, small_vocab), dtype=np.int64)


@pytest.fixture(scope="session")
def small_index(small_corpus):
    return build_index(small_corpus)


@pytest.fixture(scope="session")
def small_model(small_corpus, small_vocab):
    """One trained model shared by read-only tests (training is seeded)."""
    model, _stats = train(
        small_corpus,
        small_vocab,
        TrainConfig(dim=10, epochs=8, workers=1, seed=3),
    )
    return model


def random_model(vocabulary, dim, seed, dtype=np.float64):
    """Fresh random model with nonzero output vectors, for oracle tests."""
    rng = np.random.default_rng(seed)
    model = EmbeddingModel.initialize(vocabulary, dim, rng, dtype=dtype)
    model.output_vectors = rng.normal(0.0, 0.5, size=model.output_vectors.shape).astype(
        dtype
    )
    model.input_vectors = rng.normal(0.0, 0.5, size=model.input_vectors.shape).astype(
        dtype
    )
    return model
