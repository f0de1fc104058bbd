import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from dramatopics.semmap import (
    EmbeddingCoords,
    MapError,
    classical_mds,
    cosine_distance_matrix,
    place_labels,
    representative_docs,
)
from dramatopics.topicmodel import TopicModel


def pairwise(xy):
    return np.sqrt(((xy[:, None, :] - xy[None, :, :]) ** 2).sum(axis=-1))


def model_with_theta(theta, ids=None):
    theta = np.asarray(theta, dtype=float)
    ids = ids or [f"doc{i}" for i in range(len(theta))]
    K = theta.shape[1]
    return TopicModel(theta, np.full((K, 2), 0.5), "LDA", 0, {}, ("a", "b"), ids, [1700] * len(ids))


def test_cosine_examples():
    d = cosine_distance_matrix([[1, 0], [0, 1], [1, 0]])
    assert d[0, 1] == 1.0 and d[0, 2] == 0.0
    u = np.array([1, 1, 0]) / math.sqrt(2)
    d = cosine_distance_matrix([u, [1, 0, 0]])
    assert d[0, 1] == pytest.approx(1 - 1 / math.sqrt(2), abs=1e-12)


def test_cosine_zero_row():
    with pytest.raises(MapError):
        cosine_distance_matrix([[0, 0], [1, 0]])


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, (6, 4), elements=st.floats(0.01, 1.0)))
def test_cosine_symmetric_zero_diagonal(theta):
    d = cosine_distance_matrix(theta)
    assert np.array_equal(d, d.T)
    assert (np.diag(d) == 0).all()
    assert ((d >= 0) & (d <= 1)).all()


def test_two_points():
    c = classical_mds([[0, 3.0], [3.0, 0]])
    assert sorted(c.xy[:, 0].tolist()) == pytest.approx([-1.5, 1.5], abs=1e-12)
    assert c.xy[:, 1].tolist() == [0.0, 0.0]
    assert c.xy[np.argmax(np.abs(c.xy[:, 0])), 0] > 0


def test_equilateral_triangle():
    D = np.ones((3, 3)) - np.eye(3)
    c = classical_mds(D)
    rec = pairwise(c.xy)
    np.testing.assert_allclose(rec[np.triu_indices(3, 1)], 1.0, atol=1e-9)


def test_all_zero_distances():
    c = classical_mds(np.zeros((4, 4)))
    assert np.array_equal(c.xy, np.zeros((4, 2)))


def test_rejects_bad_input():
    with pytest.raises(MapError):
        classical_mds([[0, 1], [2, 0]])
    with pytest.raises(MapError):
        classical_mds([[1, 1], [1, 0]])


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (8, 2), elements=st.floats(-10, 10)))
def test_isometry_for_planar_points(pts):
    D = pairwise(pts)
    c = classical_mds(D)
    # coordinates come from sqrt of Gram eigenvalues, so they resolve only to ~sqrt(eps) * scale
    atol = 1e-6 * max(1.0, float(D.max()))
    np.testing.assert_allclose(pairwise(c.xy), D, atol=atol)
    assert all(b <= a for a, b in zip(c.eigenvalues, c.eigenvalues[1:]))


def test_deterministic():
    theta = np.random.default_rng(2).dirichlet(np.ones(5), size=40)
    D = cosine_distance_matrix(theta)
    a, b = classical_mds(D), classical_mds(D)
    assert np.abs(a.xy - b.xy).max() <= 1e-9


def test_representative_docs():
    m = model_with_theta([[0.9, 0.1], [0.1, 0.9], [0.5, 0.5]])
    assert representative_docs(m, 0, 2) == ["doc0", "doc2"]
    m = model_with_theta([[0.5, 0.5]] * 3, ids=["c", "a", "b"])
    assert representative_docs(m, 0, 3) == ["a", "b", "c"]
    with pytest.raises(MapError):
        representative_docs(m, 2, 1)


def test_representative_five():
    theta = np.random.default_rng(0).dirichlet(np.ones(3), size=20)
    ids = representative_docs(model_with_theta(theta), 1, 5)
    assert len(ids) == 5


def _coords(xy):
    ids = [f"doc{i}" for i in range(len(xy))]
    return EmbeddingCoords(ids, np.asarray(xy, dtype=float), np.zeros(len(xy)))


def test_place_labels_examples():
    theta = [[0.9, 0.1]] * 5 + [[0.1, 0.9]] * 2
    m = model_with_theta(theta)
    c = place_labels(_coords([[1, 1]] * 5 + [[9, 9]] * 2), m, [(0, "A")])
    assert c.labels == [(0, "A", 1.0, 1.0)]
    c = place_labels(_coords([[0, 0], [2, 0], [0, 2], [2, 2], [1, 1], [9, 9], [9, 9]]), m, [(0, "A")])
    assert c.labels[0][2:] == (1.0, 1.0)
    with pytest.raises(MapError):
        place_labels(_coords([[0, 0]] * 7), m, [(5, "X")])


def test_place_labels_random_matches_mean():
    rng = np.random.default_rng(8)
    theta = rng.dirichlet(np.ones(3), size=30)
    xy = rng.normal(size=(30, 2))
    m = model_with_theta(theta)
    c = place_labels(_coords(xy), m, [(k, str(k)) for k in range(3)])
    for k, _, x, y in c.labels:
        top = np.argsort(-theta[:, k], kind="stable")[:5]
        assert x == pytest.approx(sum(xy[i, 0] for i in top) / 5, abs=1e-12)
        assert y == pytest.approx(sum(xy[i, 1] for i in top) / 5, abs=1e-12)
