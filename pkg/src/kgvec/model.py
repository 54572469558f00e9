"""Paired input/output embedding matrices and the text interchange format.

The text format is the common word-embedding one: a ``<vocab> <dim>`` header
line, then one ``<uri> <f1> ... <fd>`` line per token, space-separated with
``.``-decimal floats. Third-party models in that format load directly. A
binary sidecar (same header, then per row the token, a space, and d
little-endian 32-bit floats) exists for fast reload.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FormatError, NumericalDivergence
from .graph import Vocabulary


@dataclass
class EmbeddingModel:
    vocabulary: Vocabulary
    input_vectors: np.ndarray
    output_vectors: np.ndarray

    def __post_init__(self):
        if self.input_vectors.shape != self.output_vectors.shape:
            raise ValueError("input and output matrices must have identical shape")
        if self.input_vectors.shape[0] != len(self.vocabulary):
            raise ValueError("matrix rows must match vocabulary size")

    @property
    def size(self) -> int:
        return self.input_vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.input_vectors.shape[1]

    @classmethod
    def initialize(cls, vocabulary, dim, rng=None, dtype=np.float32):
        """Fresh model: inputs uniform in [-0.5/d, +0.5/d], outputs zero."""
        if dim < 1:
            raise ValueError(f"dimensionality must be >= 1, got {dim}")
        rng = np.random.default_rng(rng)
        shape = (len(vocabulary), dim)
        bound = 0.5 / dim
        inputs = rng.uniform(-bound, bound, size=shape).astype(dtype)
        outputs = np.zeros(shape, dtype=dtype)
        return cls(vocabulary, inputs, outputs)

    def published(self, which: str = "input") -> np.ndarray:
        if which == "input":
            return self.input_vectors
        if which == "output":
            return self.output_vectors
        raise ValueError(f"unknown matrix {which!r}")

    def check_finite(self, context: str = "") -> None:
        """Full scan; raises NumericalDivergence if any entry is NaN/Inf."""
        if not np.isfinite(self.input_vectors).all() or not np.isfinite(
            self.output_vectors
        ).all():
            suffix = f" ({context})" if context else ""
            raise NumericalDivergence(f"non-finite model entries{suffix}")


def save_model(model: EmbeddingModel, path, which: str = "input") -> None:
    matrix = model.published(which)
    with open(path, "w", encoding="utf-8") as out:
        out.write(f"{model.size} {model.dim}\n")
        for uri, row in zip(model.vocabulary.uris, matrix):
            out.write(uri)
            out.write(" ")
            out.write(" ".join(f"{x:.6f}" for x in row))
            out.write("\n")


def load_model(path) -> EmbeddingModel:
    """Load a text-format model; the output matrix is not stored, so it loads as zeros."""
    with open(path, encoding="utf-8") as handle:
        header = handle.readline()
        parts = header.split()
        if len(parts) != 2:
            raise FormatError("expected '<vocab-size> <dimensionality>' header", line=1)
        try:
            size, dim = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError("non-integer header fields", line=1) from None
        if size < 0 or dim < 1:
            raise FormatError("header out of range", line=1)

        uris: list[str] = []
        vectors = np.empty((size, dim), dtype=np.float32)
        row = 0
        lineno = 1
        for lineno, line in enumerate(handle, start=2):
            if not line.strip():
                continue
            if row >= size:
                raise FormatError("more rows than the header declares", line=lineno)
            fields = line.rstrip("\n").split(" ")
            if len(fields) != dim + 1:
                raise FormatError(
                    f"expected {dim} floats, found {len(fields) - 1}", line=lineno
                )
            try:
                vectors[row] = [float(x) for x in fields[1:]]
            except ValueError:
                raise FormatError("unparseable float", line=lineno) from None
            uris.append(fields[0])
            row += 1
        if row != size:
            raise FormatError(f"header declares {size} rows, found {row}", line=lineno)

    vocabulary = Vocabulary(
        uris, np.ones(size, dtype=np.int64), np.zeros(size, dtype=np.uint8), min_count=1
    )
    return EmbeddingModel(vocabulary, vectors, np.zeros_like(vectors))


def save_model_binary(model: EmbeddingModel, path, which: str = "input") -> None:
    matrix = np.ascontiguousarray(model.published(which), dtype="<f4")
    with open(path, "wb") as out:
        out.write(f"{model.size} {model.dim}\n".encode("utf-8"))
        for uri, row in zip(model.vocabulary.uris, matrix):
            out.write(uri.encode("utf-8"))
            out.write(b" ")
            out.write(row.tobytes())
            out.write(b"\n")


def load_model_binary(path) -> EmbeddingModel:
    with open(path, "rb") as handle:
        header = handle.readline().decode("utf-8")
        parts = header.split()
        if len(parts) != 2:
            raise FormatError("expected '<vocab-size> <dimensionality>' header", line=1)
        size, dim = int(parts[0]), int(parts[1])
        row_bytes = 4 * dim
        uris: list[str] = []
        vectors = np.empty((size, dim), dtype=np.float32)
        for row in range(size):
            token = bytearray()
            while True:
                ch = handle.read(1)
                if not ch:
                    raise FormatError("truncated file", line=row + 2)
                if ch == b" ":
                    break
                token.extend(ch)
            uris.append(token.decode("utf-8"))
            blob = handle.read(row_bytes)
            if len(blob) != row_bytes:
                raise FormatError("truncated vector row", line=row + 2)
            vectors[row] = np.frombuffer(blob, dtype="<f4")
            handle.read(1)  # trailing newline
    vocabulary = Vocabulary(
        uris, np.ones(size, dtype=np.int64), np.zeros(size, dtype=np.uint8), min_count=1
    )
    return EmbeddingModel(vocabulary, vectors, np.zeros_like(vectors))
