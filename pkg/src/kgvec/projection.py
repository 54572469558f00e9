"""PCA projection of embedding vectors down to k dimensions for plotting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FlagError


@dataclass
class ProjectionMatrix:
    components: np.ndarray  # [k, d], orthonormal rows
    explained_variance: np.ndarray  # [k], non-increasing
    mean: np.ndarray  # [d]

    def __post_init__(self):
        gram = self.components @ self.components.T
        if not np.allclose(gram, np.eye(len(self.components)), atol=1e-8):
            raise ValueError("component rows must be orthonormal")
        ev = self.explained_variance
        if np.any(ev[:-1] < ev[1:]):
            raise ValueError("explained variance must be non-increasing")

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        total = self.explained_variance.sum()
        if total <= 0:
            return np.zeros_like(self.explained_variance)
        return self.explained_variance / total

    def transform(self, vectors: np.ndarray) -> np.ndarray:
        return (np.asarray(vectors, dtype=np.float64) - self.mean) @ self.components.T


def pca_project(
    vectors: np.ndarray, k: int, row_ids=None
) -> tuple[ProjectionMatrix, np.ndarray]:
    """Top-k principal components of the selected vectors plus coordinates.

    Eigendecomposition of the sample covariance; eigenvalues are clamped at
    zero. Each component's largest-magnitude coordinate is made positive so
    output is reproducible regardless of solver sign choices.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    if row_ids is not None:
        vectors = vectors[np.asarray(row_ids)]
    m, d = vectors.shape
    if not 1 <= k <= d:
        raise FlagError(f"rank {k} outside [1, {d}]")
    if m < 2:
        raise ValueError("need at least 2 vectors to project")

    mean = vectors.mean(axis=0)
    centered = vectors - mean
    cov = (centered.T @ centered) / (m - 1)
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1][:k]
    components = eigenvectors[:, order].T.copy()
    variance = np.maximum(eigenvalues[order], 0.0)
    for row in components:
        pivot = int(np.argmax(np.abs(row)))
        if row[pivot] < 0:
            row *= -1.0

    matrix = ProjectionMatrix(components, variance, mean)
    return matrix, centered @ components.T


def write_projection(path, uris, coordinates) -> None:
    """TSV rows: uri then one column per projected coordinate."""
    coordinates = np.asarray(coordinates)
    with open(path, "w", encoding="utf-8") as out:
        for uri, row in zip(uris, coordinates):
            cols = "\t".join(f"{x:.6f}" for x in row)
            out.write(f"{uri}\t{cols}\n")
