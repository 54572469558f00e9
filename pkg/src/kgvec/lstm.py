"""Hand-rolled LSTM triple classifier: recurrent cell, dense tanh layer,
sigmoid output neuron, full backward pass, and Adam.

The cell reads the three embedding vectors of a triple as a sequence from a
zero initial state. Hidden size equals the embedding dimensionality. All
parameters live in a flat name -> array dict so the optimizer and the
serializer can treat them uniformly.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError

MAGIC = b"KGVSCORE"
VERSION = 1

# fixed order for serialization and for iterating parameters
PARAM_ORDER = (
    "W_i",
    "W_f",
    "W_o",
    "W_c",
    "b_i",
    "b_f",
    "b_o",
    "b_c",
    "W_dense",
    "b_dense",
    "w_out",
    "b_out",
)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-np.clip(x, -500, 500)))


def param_shapes(dim: int) -> dict[str, tuple]:
    d, h = dim, dim
    shapes: dict[str, tuple] = {}
    for gate in ("i", "f", "o", "c"):
        shapes[f"W_{gate}"] = (d + h, h)
        shapes[f"b_{gate}"] = (h,)
    shapes["W_dense"] = (h, h)
    shapes["b_dense"] = (h,)
    shapes["w_out"] = (h,)
    shapes["b_out"] = (1,)
    return shapes


class NeuralScorer:
    """LSTM + dense(tanh) + sigmoid head over a 3-step embedding sequence."""

    def __init__(self, dim: int, params: dict[str, np.ndarray] | None = None):
        self.dim = int(dim)
        if params is None:
            params = {
                name: np.zeros(shape) for name, shape in param_shapes(dim).items()
            }
        self.params = params
        for name, shape in param_shapes(dim).items():
            if self.params[name].shape != shape:
                raise ValueError(f"{name} has shape {self.params[name].shape}, want {shape}")

    @classmethod
    def initialize(cls, dim: int, rng=None) -> "NeuralScorer":
        rng = np.random.default_rng(rng)
        d, h = dim, dim
        scale = 1.0 / np.sqrt(d + h)
        params: dict[str, np.ndarray] = {}
        for gate in ("i", "f", "o", "c"):
            params[f"W_{gate}"] = rng.uniform(-scale, scale, size=(d + h, h))
            params[f"b_{gate}"] = np.zeros(h)
        params["b_f"] = np.ones(h)  # open forget gate at start
        params["W_dense"] = rng.uniform(-1.0 / np.sqrt(h), 1.0 / np.sqrt(h), size=(h, h))
        params["b_dense"] = np.zeros(h)
        params["w_out"] = rng.uniform(-1.0 / np.sqrt(h), 1.0 / np.sqrt(h), size=h)
        params["b_out"] = np.zeros(1)
        return cls(dim, params)

    def _forward(self, inputs: np.ndarray):
        """Run the cell over ``inputs`` [batch, 3, dim]; returns probs and cache."""
        p = self.params
        batch = inputs.shape[0]
        h = np.zeros((batch, self.dim))
        c = np.zeros((batch, self.dim))
        steps = []
        for t in range(inputs.shape[1]):
            z = np.concatenate([inputs[:, t, :], h], axis=1)
            gi = _sigmoid(z @ p["W_i"] + p["b_i"])
            gf = _sigmoid(z @ p["W_f"] + p["b_f"])
            go = _sigmoid(z @ p["W_o"] + p["b_o"])
            gc = np.tanh(z @ p["W_c"] + p["b_c"])
            c_new = gf * c + gi * gc
            tc = np.tanh(c_new)
            h_new = go * tc
            steps.append((z, gi, gf, go, gc, c, tc))
            h, c = h_new, c_new
        dense_pre = h @ p["W_dense"] + p["b_dense"]
        dense = np.tanh(dense_pre)
        logits = dense @ p["w_out"] + p["b_out"][0]
        probs = _sigmoid(logits)
        cache = (steps, h, dense, logits)
        return probs, cache

    def forward_batch(self, inputs: np.ndarray) -> np.ndarray:
        """Probabilities in (0,1) for a batch of embedding sequences."""
        probs, _ = self._forward(np.asarray(inputs, dtype=np.float64))
        return probs

    def forward(self, sequence: np.ndarray) -> float:
        """Probability for a single [3, dim] embedding sequence."""
        return float(self.forward_batch(np.asarray(sequence)[None, :, :])[0])

    def backward(self, inputs: np.ndarray, cache, dlogits: np.ndarray):
        """Gradients of sum(dlogits * logits) w.r.t. every parameter.

        Pass dlogits = (prob - label) / batch to get mean BCE gradients.
        """
        p = self.params
        steps, h_last, dense, _logits = cache
        grads = {name: np.zeros_like(arr) for name, arr in p.items()}

        grads["w_out"] = dense.T @ dlogits
        grads["b_out"][0] = dlogits.sum()
        ddense = np.outer(dlogits, p["w_out"]) * (1.0 - dense**2)
        grads["W_dense"] = h_last.T @ ddense
        grads["b_dense"] = ddense.sum(axis=0)

        dh = ddense @ p["W_dense"].T
        dc = np.zeros_like(dh)
        for t in range(len(steps) - 1, -1, -1):
            z, gi, gf, go, gc, c_prev, tc = steps[t]
            dgo = dh * tc * go * (1.0 - go)
            dc = dc + dh * go * (1.0 - tc**2)
            dgi = dc * gc * gi * (1.0 - gi)
            dgc = dc * gi * (1.0 - gc**2)
            dgf = dc * c_prev * gf * (1.0 - gf)

            grads["W_i"] += z.T @ dgi
            grads["W_f"] += z.T @ dgf
            grads["W_o"] += z.T @ dgo
            grads["W_c"] += z.T @ dgc
            grads["b_i"] += dgi.sum(axis=0)
            grads["b_f"] += dgf.sum(axis=0)
            grads["b_o"] += dgo.sum(axis=0)
            grads["b_c"] += dgc.sum(axis=0)

            dz = dgi @ p["W_i"].T + dgf @ p["W_f"].T + dgo @ p["W_o"].T + dgc @ p["W_c"].T
            dh = dz[:, self.dim :]
            dc = dc * gf
        return grads


def bce_loss(logits: np.ndarray, labels: np.ndarray) -> float:
    """Mean binary cross-entropy computed from logits (overflow-safe)."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    per = labels * np.logaddexp(0.0, -logits) + (1.0 - labels) * np.logaddexp(0.0, logits)
    return float(per.mean())


def bce_loss_and_grads(scorer: NeuralScorer, inputs: np.ndarray, labels: np.ndarray):
    """Mean BCE over the batch plus gradients for every scorer parameter."""
    inputs = np.asarray(inputs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    probs, cache = scorer._forward(inputs)
    loss = bce_loss(cache[3], labels)
    dlogits = (probs - labels) / len(labels)
    grads = scorer.backward(inputs, cache, dlogits)
    return loss, grads


@dataclass
class AdamConfig:
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


class AdamState:
    """First/second moment accumulators with bias correction."""

    def __init__(self, params: dict[str, np.ndarray], config: AdamConfig | None = None):
        self.config = config or AdamConfig()
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}
        self.step_count = 0

    def step(self, params: dict[str, np.ndarray], grads: dict[str, np.ndarray]) -> None:
        cfg = self.config
        self.step_count += 1
        correction1 = 1.0 - cfg.beta1**self.step_count
        correction2 = 1.0 - cfg.beta2**self.step_count
        for key, grad in grads.items():
            self.m[key] = cfg.beta1 * self.m[key] + (1.0 - cfg.beta1) * grad
            self.v[key] = cfg.beta2 * self.v[key] + (1.0 - cfg.beta2) * grad**2
            m_hat = self.m[key] / correction1
            v_hat = self.v[key] / correction2
            params[key] -= cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.epsilon)


def save_scorer(scorer: NeuralScorer, path) -> None:
    """Binary format: magic, version byte, u32 dim, tensors in fixed order (LE f32)."""
    with open(path, "wb") as out:
        out.write(MAGIC)
        out.write(struct.pack("<B", VERSION))
        out.write(struct.pack("<I", scorer.dim))
        for name in PARAM_ORDER:
            out.write(np.ascontiguousarray(scorer.params[name], dtype="<f4").tobytes())


def load_scorer(path) -> NeuralScorer:
    with open(path, "rb") as handle:
        magic = handle.read(len(MAGIC))
        if magic != MAGIC:
            raise FormatError(f"bad magic {magic!r}")
        (version,) = struct.unpack("<B", handle.read(1))
        if version != VERSION:
            raise FormatError(f"unsupported scorer version {version}")
        (dim,) = struct.unpack("<I", handle.read(4))
        shapes = param_shapes(dim)
        params = {}
        for name in PARAM_ORDER:
            shape = shapes[name]
            count = int(np.prod(shape))
            blob = handle.read(4 * count)
            if len(blob) != 4 * count:
                raise FormatError(f"truncated tensor {name}")
            params[name] = (
                np.frombuffer(blob, dtype="<f4").astype(np.float64).reshape(shape)
            )
        if handle.read(1):
            raise FormatError("trailing bytes after final tensor")
    return NeuralScorer(dim, params)


def scorer_summary(scorer: NeuralScorer) -> str:
    """Debug exporter: JSON of tensor shapes and L2 norms."""
    tensors = {
        name: {
            "shape": list(scorer.params[name].shape),
            "l2_norm": float(np.linalg.norm(scorer.params[name])),
        }
        for name in PARAM_ORDER
    }
    return json.dumps({"dim": scorer.dim, "tensors": tensors}, indent=2, sort_keys=True)
