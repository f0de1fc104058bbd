"""Non-negative matrix factorization X ~ W H by Frobenius multiplicative updates."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import sparse

from .corpus import DocTermMatrix
from .topicmodel import ModelError, TopicModel

log = logging.getLogger(__name__)

EPS = 1e-12  # guard in update denominators


@dataclass(frozen=True)
class NmfConfig:
    K: int = 10
    max_iterations: int = 500
    tolerance: float = 1e-5
    seed: int = 0
    weighting: str = "tf-idf"  # or "raw-counts"

    def __post_init__(self):
        if self.K < 1:
            raise ModelError("K must be >= 1")
        if self.tolerance <= 0:
            raise ModelError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ModelError("max_iterations must be >= 1")
        if self.weighting not in ("tf-idf", "raw-counts"):
            raise ModelError(f"unknown weighting {self.weighting!r}")


@dataclass
class NmfModel:
    W: np.ndarray  # D x K
    H: np.ndarray  # K x V
    objective_trace: list[float] = field(default_factory=list)
    config: dict = field(default_factory=dict)


def tfidf(counts) -> sparse.csr_matrix:
    """Raw term frequency times smoothed idf, rows scaled to unit L2 norm."""
    X = sparse.csr_matrix(counts, dtype=np.float64)
    n_docs = X.shape[0]
    df = np.bincount(X.indices, minlength=X.shape[1])
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    X = sparse.csr_matrix(X @ sparse.diags(idf))
    norms = np.sqrt(np.asarray(X.multiply(X).sum(axis=1)).ravel())
    norms[norms == 0] = 1.0
    return sparse.csr_matrix(sparse.diags(1.0 / norms) @ X)


def _objective(X, W, H) -> float:
    if sparse.issparse(X):
        # ||X||^2 - 2 tr(W^T X H^T) + tr(W^T W H H^T), avoids densifying X
        xx = X.multiply(X).sum()
        cross = np.sum(W * (X @ H.T))
        quad = np.sum((W.T @ W) * (H @ H.T))
        return float(max(xx - 2.0 * cross + quad, 0.0))
    R = X - W @ H
    return float(np.sum(R * R))


def fit_nmf(X, cfg: NmfConfig) -> NmfModel:
    """Factor a nonnegative matrix (dense array or scipy sparse).

    Stops after `max_iterations` or once the relative decrease of the squared
    Frobenius error falls below `tolerance`. The objective after every
    iteration is kept in `objective_trace`.
    """
    if sparse.issparse(X):
        X = sparse.csr_matrix(X, dtype=np.float64)
        if X.nnz and X.data.min() < 0:
            raise ModelError("NMF input has negative entries")
        mean = X.sum() / (X.shape[0] * X.shape[1])
    else:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ModelError("NMF input must be 2-D")
        if (X < 0).any():
            raise ModelError("NMF input has negative entries")
        mean = X.mean()
    D, V = X.shape
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    scale = np.sqrt(mean / cfg.K) if mean > 0 else 1.0
    W = rng.random((D, cfg.K)) * scale
    H = rng.random((cfg.K, V)) * scale

    trace: list[float] = []
    for it in range(cfg.max_iterations):
        H *= (W.T @ X) / (W.T @ W @ H + EPS)
        W *= np.asarray(X @ H.T) / (W @ (H @ H.T) + EPS)
        obj = _objective(X, W, H)
        trace.append(obj)
        if it > 0:
            prev = trace[-2]
            if prev == 0.0 or (prev - obj) / prev < cfg.tolerance:
                break
    log.debug("NMF stopped after %d iterations, objective %.6g", len(trace), trace[-1])
    return NmfModel(W, H, trace, asdict(cfg))


def doc_topic_proportions(model: NmfModel) -> tuple[np.ndarray, np.ndarray]:
    """Row-normalized W plus a boolean mask of all-zero rows (mapped to uniform)."""
    W = model.W
    sums = W.sum(axis=1)
    zero = sums <= 0
    props = np.empty_like(W)
    props[~zero] = W[~zero] / sums[~zero, None]
    props[zero] = 1.0 / W.shape[1]
    return props, zero


def fit_nmf_model(matrix: DocTermMatrix, cfg: NmfConfig) -> tuple[TopicModel, NmfModel]:
    """Weight the counts, factor, and wrap the result as a TopicModel (method NMF)."""
    X = tfidf(matrix.counts) if cfg.weighting == "tf-idf" else sparse.csr_matrix(matrix.counts, dtype=np.float64)
    if cfg.K > matrix.shape[1]:
        raise ModelError(f"K={cfg.K} exceeds vocabulary size {matrix.shape[1]}")
    nmf = fit_nmf(X, cfg)
    theta, zero_docs = doc_topic_proportions(nmf)
    H = nmf.H
    hsum = H.sum(axis=1)
    zero_topics = hsum <= 0
    phi = np.where(zero_topics[:, None], 1.0 / H.shape[1], H / np.where(zero_topics, 1.0, hsum)[:, None])
    if zero_docs.any():
        log.warning("%d documents have all-zero loadings; mapped to uniform", int(zero_docs.sum()))
    flags = {
        "zero_loading_docs": [matrix.doc_ids[i] for i in np.flatnonzero(zero_docs)],
        "zero_topics": np.flatnonzero(zero_topics).tolist(),
        "iterations": len(nmf.objective_trace),
        "final_objective": nmf.objective_trace[-1],
    }
    model = TopicModel(theta, phi, "NMF", cfg.seed, asdict(cfg), matrix.vocab.terms,
                       list(matrix.doc_ids), list(matrix.doc_years), flags)
    return model, nmf
