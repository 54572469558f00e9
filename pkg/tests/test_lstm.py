import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from kgvec.errors import FormatError
from kgvec.lstm import (
    MAGIC,
    PARAM_ORDER,
    AdamConfig,
    AdamState,
    NeuralScorer,
    bce_loss,
    bce_loss_and_grads,
    load_scorer,
    param_shapes,
    save_scorer,
    scorer_summary,
)


def _batch(rng, n, dim):
    return rng.normal(0.0, 1.0, size=(n, 3, dim))


def test_param_shapes_cover_order():
    shapes = param_shapes(5)
    assert set(shapes) == set(PARAM_ORDER)
    assert shapes["W_i"] == (10, 5)
    assert shapes["b_f"] == (5,)
    assert shapes["W_dense"] == (5, 5)
    assert shapes["w_out"] == (5,)
    assert shapes["b_out"] == (1,)


def test_zero_parameters_give_half():
    """Every gate sits at its fixed point, so the head sees a zero logit."""
    scorer = NeuralScorer(6)
    rng = np.random.default_rng(0)
    probs = scorer.forward_batch(_batch(rng, 10, 6))
    assert np.allclose(probs, 0.5, atol=1e-15)


def test_initialize_sets_biases():
    scorer = NeuralScorer.initialize(8, rng=np.random.default_rng(1))
    assert np.array_equal(scorer.params["b_f"], np.ones(8))
    assert np.array_equal(scorer.params["b_i"], np.zeros(8))
    bound = 1.0 / math.sqrt(16)
    assert np.abs(scorer.params["W_i"]).max() <= bound


def test_initialize_deterministic():
    a = NeuralScorer.initialize(4, rng=np.random.default_rng(9))
    b = NeuralScorer.initialize(4, rng=np.random.default_rng(9))
    for name in PARAM_ORDER:
        assert np.array_equal(a.params[name], b.params[name])


def test_shape_mismatch_rejected():
    params = {name: np.zeros(shape) for name, shape in param_shapes(4).items()}
    params["W_i"] = np.zeros((3, 3))
    with pytest.raises(ValueError):
        NeuralScorer(4, params)


def test_single_forward_matches_batch():
    rng = np.random.default_rng(3)
    scorer = NeuralScorer.initialize(5, rng=rng)
    inputs = _batch(rng, 7, 5)
    batched = scorer.forward_batch(inputs)
    for i in range(7):
        assert scorer.forward(inputs[i]) == pytest.approx(batched[i], abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    hnp.arrays(
        np.float64,
        (3, 4),
        elements=st.floats(-5, 5, allow_nan=False, width=64),
    )
)
def test_probability_stays_open_interval(sequence):
    scorer = NeuralScorer.initialize(4, rng=np.random.default_rng(17))
    p = scorer.forward(sequence)
    assert 0.0 < p < 1.0


def test_bce_loss_hand_values():
    # logit 0 vs both labels: ln 2 each way
    assert bce_loss(np.array([0.0]), np.array([1.0])) == pytest.approx(math.log(2))
    assert bce_loss(np.array([0.0]), np.array([0.0])) == pytest.approx(math.log(2))
    # confident and correct: softplus(-10)
    assert bce_loss(np.array([10.0]), np.array([1.0])) == pytest.approx(
        math.log1p(math.exp(-10))
    )
    # overflow-safe at extreme logits
    assert np.isfinite(bce_loss(np.array([800.0]), np.array([0.0])))


def test_gradients_match_finite_differences():
    """Central differences over every parameter coordinate, d=4."""
    rng = np.random.default_rng(23)
    scorer = NeuralScorer.initialize(4, rng=rng)
    inputs = _batch(rng, 3, 4)
    labels = np.array([1.0, 0.0, 1.0])
    _, grads = bce_loss_and_grads(scorer, inputs, labels)
    h = 1e-5

    def loss():
        return bce_loss_and_grads(scorer, inputs, labels)[0]

    worst = 0.0
    for name in PARAM_ORDER:
        tensor = scorer.params[name]
        for idx in np.ndindex(tensor.shape):
            orig = tensor[idx]
            tensor[idx] = orig + h
            up = loss()
            tensor[idx] = orig - h
            down = loss()
            tensor[idx] = orig
            num = (up - down) / (2 * h)
            denom = max(abs(num), abs(grads[name][idx]), 1e-4)
            worst = max(worst, abs(num - grads[name][idx]) / denom)
    assert worst < 1e-3


def test_gradient_shapes_match_parameters():
    rng = np.random.default_rng(5)
    scorer = NeuralScorer.initialize(3, rng=rng)
    _, grads = bce_loss_and_grads(scorer, _batch(rng, 4, 3), np.ones(4))
    assert set(grads) == set(PARAM_ORDER)
    for name in PARAM_ORDER:
        assert grads[name].shape == scorer.params[name].shape


def test_adam_zero_gradient_is_fixed_point():
    scorer = NeuralScorer.initialize(4, rng=np.random.default_rng(2))
    before = {k: v.copy() for k, v in scorer.params.items()}
    adam = AdamState(scorer.params)
    zeros = {k: np.zeros_like(v) for k, v in scorer.params.items()}
    adam.step(scorer.params, zeros)
    for name in PARAM_ORDER:
        assert np.array_equal(scorer.params[name], before[name])


def test_adam_first_step_bounded_by_lr():
    """Bias correction makes the first update lr * g/(|g| + eps') <= lr."""
    config = AdamConfig(lr=1e-3)
    scorer = NeuralScorer.initialize(4, rng=np.random.default_rng(7))
    before = {k: v.copy() for k, v in scorer.params.items()}
    adam = AdamState(scorer.params, config)
    grads = {
        k: np.random.default_rng(11).normal(size=v.shape)
        for k, v in scorer.params.items()
    }
    adam.step(scorer.params, grads)
    for name in PARAM_ORDER:
        delta = np.abs(scorer.params[name] - before[name])
        assert delta.max() <= config.lr * (1 + 1e-9)


def test_adam_descends_on_fixed_batch():
    rng = np.random.default_rng(31)
    scorer = NeuralScorer.initialize(4, rng=rng)
    inputs = _batch(rng, 16, 4)
    labels = (np.arange(16) % 2).astype(np.float64)
    adam = AdamState(scorer.params, AdamConfig(lr=1e-2))
    first, grads = bce_loss_and_grads(scorer, inputs, labels)
    for _ in range(60):
        adam.step(scorer.params, grads)
        _, grads = bce_loss_and_grads(scorer, inputs, labels)
    last, _ = bce_loss_and_grads(scorer, inputs, labels)
    assert last < first


def test_save_load_round_trip(tmp_path):
    rng = np.random.default_rng(13)
    scorer = NeuralScorer.initialize(6, rng=rng)
    path = tmp_path / "scorer.bin"
    save_scorer(scorer, path)
    loaded = load_scorer(path)
    assert loaded.dim == 6
    for name in PARAM_ORDER:
        assert np.allclose(loaded.params[name], scorer.params[name], atol=1e-6)
    inputs = _batch(rng, 5, 6)
    assert np.allclose(
        loaded.forward_batch(inputs), scorer.forward_batch(inputs), atol=1e-5
    )


def test_load_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOTMAGIC" + b"\x00" * 64)
    with pytest.raises(FormatError, match="magic"):
        load_scorer(path)


def test_load_rejects_bad_version(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(MAGIC + bytes([250]) + b"\x00" * 64)
    with pytest.raises(FormatError, match="version"):
        load_scorer(path)


def test_load_rejects_truncation(tmp_path):
    scorer = NeuralScorer.initialize(4, rng=np.random.default_rng(1))
    path = tmp_path / "scorer.bin"
    save_scorer(scorer, path)
    blob = path.read_bytes()
    path.write_bytes(blob[:-5])
    with pytest.raises(FormatError, match="truncated"):
        load_scorer(path)


def test_load_rejects_trailing_bytes(tmp_path):
    scorer = NeuralScorer.initialize(4, rng=np.random.default_rng(1))
    path = tmp_path / "scorer.bin"
    save_scorer(scorer, path)
    path.write_bytes(path.read_bytes() + b"\x00")
    with pytest.raises(FormatError, match="trailing"):
        load_scorer(path)


def test_summary_lists_every_tensor():
    scorer = NeuralScorer.initialize(5, rng=np.random.default_rng(3))
    payload = json.loads(scorer_summary(scorer))
    assert payload["dim"] == 5
    assert set(payload["tensors"]) == set(PARAM_ORDER)
    assert payload["tensors"]["W_i"]["shape"] == [10, 5]
    assert payload["tensors"]["b_f"]["l2_norm"] == pytest.approx(math.sqrt(5))
