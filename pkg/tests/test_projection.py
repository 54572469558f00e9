import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgvec.errors import FlagError
from kgvec.projection import ProjectionMatrix, pca_project, write_projection


def test_two_point_cloud_has_analytic_axis():
    """Two points define one direction; it carries all the variance."""
    vectors = np.array([[0.0, 0.0], [3.0, 4.0]])
    matrix, coords = pca_project(vectors, 1)
    axis = matrix.components[0]
    assert abs(axis @ np.array([0.6, 0.8])) == pytest.approx(1.0, abs=1e-12)
    assert matrix.explained_variance[0] == pytest.approx(12.5)  # 25/2 sample var
    assert matrix.explained_variance_ratio[0] == pytest.approx(1.0)
    # symmetric coordinates around the mean
    assert coords[0] == pytest.approx(-coords[1])
    assert abs(coords[0, 0]) == pytest.approx(2.5)


def test_sign_convention_largest_coordinate_positive():
    vectors = np.array([[0.0, 0.0], [-3.0, -4.0]])
    matrix, _ = pca_project(vectors, 1)
    axis = matrix.components[0]
    assert axis[np.argmax(np.abs(axis))] > 0


def test_full_rank_projection_is_isometric():
    rng = np.random.default_rng(3)
    vectors = rng.normal(size=(40, 6))
    matrix, coords = pca_project(vectors, 6)
    centered = vectors - vectors.mean(axis=0)
    for i in range(40):
        for j in range(i + 1, 40):
            original = np.linalg.norm(centered[i] - centered[j])
            projected = np.linalg.norm(coords[i] - coords[j])
            assert projected == pytest.approx(original, abs=1e-6)


def test_variance_ordering_and_total():
    rng = np.random.default_rng(7)
    # anisotropic cloud: distinct variances per axis
    vectors = rng.normal(size=(200, 5)) * np.array([5.0, 3.0, 2.0, 1.0, 0.5])
    matrix, _ = pca_project(vectors, 5)
    ev = matrix.explained_variance
    assert np.all(ev[:-1] >= ev[1:])
    assert np.all(ev >= 0)
    total = np.trace(np.cov(vectors.T))
    assert ev.sum() == pytest.approx(total, rel=1e-6)


def test_truncated_variances_match_full_decomposition():
    rng = np.random.default_rng(11)
    vectors = rng.normal(size=(60, 4)) * np.array([4.0, 2.0, 1.0, 0.3])
    full, _ = pca_project(vectors, 4)
    top2, _ = pca_project(vectors, 2)
    np.testing.assert_allclose(
        top2.explained_variance, full.explained_variance[:2], atol=1e-10
    )


def test_transform_matches_returned_coordinates():
    rng = np.random.default_rng(5)
    vectors = rng.normal(size=(30, 5))
    matrix, coords = pca_project(vectors, 3)
    np.testing.assert_allclose(matrix.transform(vectors), coords, atol=1e-12)


def test_row_selection():
    rng = np.random.default_rng(9)
    vectors = rng.normal(size=(20, 4))
    ids = np.array([2, 5, 7, 11, 13])
    selected, coords = pca_project(vectors, 2, row_ids=ids)
    direct, direct_coords = pca_project(vectors[ids], 2)
    np.testing.assert_allclose(selected.components, direct.components, atol=1e-12)
    np.testing.assert_allclose(coords, direct_coords, atol=1e-12)
    assert coords.shape == (5, 2)


def test_rank_bounds():
    vectors = np.random.default_rng(1).normal(size=(10, 3))
    with pytest.raises(FlagError):
        pca_project(vectors, 0)
    with pytest.raises(FlagError):
        pca_project(vectors, 4)
    with pytest.raises(ValueError):
        pca_project(vectors[:1], 1)


def test_orthonormality_validated():
    with pytest.raises(ValueError):
        ProjectionMatrix(
            components=np.array([[1.0, 1.0]]),
            explained_variance=np.array([1.0]),
            mean=np.zeros(2),
        )
    with pytest.raises(ValueError):
        ProjectionMatrix(
            components=np.eye(2),
            explained_variance=np.array([1.0, 2.0]),
            mean=np.zeros(2),
        )


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 5))
def test_components_always_orthonormal(seed, k):
    vectors = np.random.default_rng(seed).normal(size=(25, 5))
    matrix, coords = pca_project(vectors, k)
    gram = matrix.components @ matrix.components.T
    np.testing.assert_allclose(gram, np.eye(k), atol=1e-8)
    assert coords.shape == (25, k)
    # projected coordinates are centered
    np.testing.assert_allclose(coords.mean(axis=0), np.zeros(k), atol=1e-9)


def test_write_projection_layout(tmp_path):
    coords = np.array([[1.25, -0.5], [0.0, 2.0]])
    path = tmp_path / "coords.tsv"
    write_projection(path, ["u1", "u2"], coords)
    lines = path.read_text().splitlines()
    assert lines[0] == "u1\t1.250000\t-0.500000"
    assert lines[1] == "u2\t0.000000\t2.000000"
