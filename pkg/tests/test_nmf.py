import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import sparse

from dramatopics.nmf import NmfConfig, NmfModel, doc_topic_proportions, fit_nmf, fit_nmf_model, tfidf
from dramatopics.topicmodel import ModelError

from conftest import two_topic_corpus


def test_rank_one_recovery():
    w = np.array([1.0, 2.0, 0.5, 3.0])
    h = np.array([0.2, 1.0, 0.0, 4.0, 2.5, 0.7])
    V = np.outer(w, h)
    model = fit_nmf(V, NmfConfig(K=1, max_iterations=2000, tolerance=1e-14, seed=0))
    assert model.objective_trace[-1] <= 1e-8 * np.sum(V * V)


def test_rank_k_recovery():
    rng = np.random.default_rng(4)
    W0, H0 = rng.random((30, 3)), rng.random((3, 20))
    V = W0 @ H0
    model = fit_nmf(V, NmfConfig(K=3, max_iterations=20000, tolerance=1e-16, seed=1))
    rel = np.linalg.norm(V - model.W @ model.H) / np.linalg.norm(V)
    assert rel < 1e-3


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12), st.integers(2, 12), st.integers(1, 4))
def test_monotone_and_nonnegative(seed, d, v, k):
    X = np.random.default_rng(seed).random((d, v))
    model = fit_nmf(X, NmfConfig(K=k, max_iterations=60, tolerance=1e-12, seed=seed))
    tr = model.objective_trace
    assert all(b <= a + 1e-12 for a, b in zip(tr, tr[1:]))
    assert (model.W >= 0).all() and (model.H >= 0).all()


def test_all_zero_matrix():
    model = fit_nmf(np.zeros((3, 4)), NmfConfig(K=2, seed=0))
    assert model.objective_trace[0] == 0.0
    assert np.array_equal(model.W @ model.H, np.zeros((3, 4)))
    props, flags = doc_topic_proportions(model)
    assert flags.all()
    np.testing.assert_array_equal(props, 0.5)


def test_negative_input():
    with pytest.raises(ModelError):
        fit_nmf(np.array([[1.0, -0.1]]), NmfConfig(K=1))
    with pytest.raises(ModelError):
        fit_nmf(sparse.csr_matrix(np.array([[1.0, -0.1]])), NmfConfig(K=1))


def test_seed_determinism():
    X = np.random.default_rng(0).random((10, 8))
    a = fit_nmf(X, NmfConfig(K=3, seed=9))
    b = fit_nmf(X, NmfConfig(K=3, seed=9))
    assert np.array_equal(a.W, b.W) and np.array_equal(a.H, b.H)


def test_sparse_matches_dense():
    X = np.random.default_rng(2).random((12, 9))
    X[X < 0.5] = 0
    a = fit_nmf(X, NmfConfig(K=2, seed=3, max_iterations=50, tolerance=1e-12))
    b = fit_nmf(sparse.csr_matrix(X), NmfConfig(K=2, seed=3, max_iterations=50, tolerance=1e-12))
    np.testing.assert_allclose(a.W, b.W, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(a.objective_trace, b.objective_trace, rtol=1e-6, atol=1e-12)


def test_proportions():
    model = NmfModel(np.array([[2.0, 2.0], [0.0, 0.0], [1.0, 3.0]]), np.ones((2, 3)))
    props, flags = doc_topic_proportions(model)
    np.testing.assert_array_equal(props, [[0.5, 0.5], [0.5, 0.5], [0.25, 0.75]])
    assert flags.tolist() == [False, True, False]


def test_random_proportions_sum_to_one():
    W = np.random.default_rng(1).random((40, 6))
    props, _ = doc_topic_proportions(NmfModel(W, np.ones((6, 2))))
    sums = [sum(row) for row in props.tolist()]
    assert max(abs(s - 1) for s in sums) <= 1e-9


def test_tfidf_rows_unit_norm():
    X = tfidf(np.array([[1, 0, 2], [0, 0, 0], [3, 1, 0]]))
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    np.testing.assert_allclose(norms, [1, 0, 1])
    # a term in every document gets the minimal idf of 1
    df_all = tfidf(np.array([[1, 1], [1, 0]])).toarray()
    assert df_all[1, 0] == 1.0


def test_config_validation():
    with pytest.raises(ModelError):
        NmfConfig(K=0)
    with pytest.raises(ModelError):
        NmfConfig(tolerance=0)
    with pytest.raises(ModelError):
        NmfConfig(weighting="bm25")


def test_fit_nmf_model_recovers_two_topics():
    matrix, _ = two_topic_corpus(n_docs=100)
    model, raw = fit_nmf_model(matrix, NmfConfig(K=2, seed=0, weighting="raw-counts"))
    assert model.method == "NMF"
    mass = sorted([model.phi[k, :50].sum() for k in range(2)])
    assert mass[0] < 0.1 and mass[1] > 0.9
    model_tfidf, _ = fit_nmf_model(matrix, NmfConfig(K=2, seed=0))
    assert np.abs(model_tfidf.theta.sum(axis=1) - 1).max() <= 1e-9
