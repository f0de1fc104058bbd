"""Latent Dirichlet Allocation fitted by collapsed Gibbs sampling.

Randomness comes from numpy's PCG64 bit generator (seeded, portable across
platforms). Each sweep draws one uniform per token up front and the compiled
kernel consumes them in token order, so a seed fixes the whole chain.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from numba import njit

from .corpus import DocTermMatrix
from .topicmodel import ModelError, TopicModel

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LdaConfig:
    K: int = 10
    alpha: float | None = None  # None means 50/K
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 500
    sample_lag: int = 10
    seed: int = 0
    check_invariants: bool = False

    def __post_init__(self):
        if self.K < 1:
            raise ModelError("K must be >= 1")
        if self.doc_prior <= 0 or self.beta <= 0:
            raise ModelError("alpha and beta must be positive")
        if not 0 <= self.burn_in < self.iterations:
            raise ModelError("burn_in must lie in [0, iterations)")
        if self.sample_lag < 1 or self.iterations - self.burn_in < self.sample_lag:
            raise ModelError("need at least one post-burn-in sample: iterations - burn_in >= sample_lag")

    @property
    def doc_prior(self) -> float:
        return 50.0 / self.K if self.alpha is None else self.alpha

    @property
    def n_samples(self) -> int:
        return (self.iterations - self.burn_in) // self.sample_lag


@dataclass
class GibbsState:
    z: np.ndarray  # topic per token
    doc_of: np.ndarray  # document per token
    word_of: np.ndarray  # term per token
    n_dk: np.ndarray
    n_kw: np.ndarray
    n_k: np.ndarray
    sweep: int = 0

    def check(self, doc_lengths: np.ndarray) -> None:
        """Raise if the count tables disagree with each other or with z."""
        if not np.array_equal(self.n_dk.sum(axis=1), doc_lengths):
            raise AssertionError(f"sweep {self.sweep}: doc-topic rows do not sum to document lengths")
        if not np.array_equal(self.n_kw.sum(axis=1), self.n_k):
            raise AssertionError(f"sweep {self.sweep}: topic-word rows do not sum to topic totals")
        if self.n_k.sum() != self.z.size:
            raise AssertionError(f"sweep {self.sweep}: topic totals do not sum to token count")


def expand_tokens(matrix: DocTermMatrix) -> tuple[np.ndarray, np.ndarray]:
    """Per-token (doc, term) arrays in row-major order of the count matrix."""
    csr = matrix.counts.tocsr()
    csr.sort_indices()
    counts = csr.data.astype(np.int64)
    docs = np.repeat(np.arange(csr.shape[0]), np.diff(csr.indptr))
    return np.repeat(docs, counts), np.repeat(csr.indices.astype(np.int64), counts)


@njit(cache=True)
def _sweep(z, doc_of, word_of, n_dk, n_kw, n_k, alpha, beta, vbeta, u, p):
    K = n_k.shape[0]
    for i in range(z.shape[0]):
        d = doc_of[i]
        w = word_of[i]
        k = z[i]
        n_dk[d, k] -= 1
        n_kw[k, w] -= 1
        n_k[k] -= 1
        total = 0.0
        for j in range(K):
            total += (n_dk[d, j] + alpha) * (n_kw[j, w] + beta) / (n_k[j] + vbeta)
            p[j] = total
        target = u[i] * total
        k = K - 1
        for j in range(K):
            if target < p[j]:
                k = j
                break
        z[i] = k
        n_dk[d, k] += 1
        n_kw[k, w] += 1
        n_k[k] += 1


def fit_lda(
    matrix: DocTermMatrix,
    cfg: LdaConfig,
    callback: Callable[[GibbsState], None] | None = None,
) -> TopicModel:
    """Fit LDA; theta and phi are posterior means averaged over thinned post-burn-in sweeps."""
    D, V = matrix.shape
    K = cfg.K
    if K > V:
        raise ModelError(f"K={K} exceeds vocabulary size {V}")
    doc_of, word_of = expand_tokens(matrix)
    if doc_of.size == 0:
        raise ModelError("matrix has no tokens")
    doc_lengths = np.asarray(matrix.counts.sum(axis=1)).ravel().astype(np.int64)

    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    z = rng.integers(0, K, size=doc_of.size, dtype=np.int64)
    n_dk = np.zeros((D, K), dtype=np.int64)
    n_kw = np.zeros((K, V), dtype=np.int64)
    np.add.at(n_dk, (doc_of, z), 1)
    np.add.at(n_kw, (z, word_of), 1)
    n_k = n_kw.sum(axis=1)
    state = GibbsState(z, doc_of, word_of, n_dk, n_kw, n_k)

    alpha, beta = cfg.doc_prior, cfg.beta
    p = np.empty(K, dtype=np.float64)
    theta_sum = np.zeros((D, K))
    phi_sum = np.zeros((K, V))
    n_samples = 0
    for sweep in range(1, cfg.iterations + 1):
        u = rng.random(doc_of.size)
        _sweep(z, doc_of, word_of, n_dk, n_kw, n_k, alpha, beta, V * beta, u, p)
        state.sweep = sweep
        if cfg.check_invariants:
            state.check(doc_lengths)
        if callback is not None:
            callback(state)
        if sweep > cfg.burn_in and (sweep - cfg.burn_in) % cfg.sample_lag == 0:
            theta_sum += (n_dk + alpha) / (doc_lengths[:, None] + K * alpha)
            phi_sum += (n_kw + beta) / (n_k[:, None] + V * beta)
            n_samples += 1
    log.debug("LDA: %d sweeps, %d samples averaged", cfg.iterations, n_samples)

    theta = theta_sum / n_samples
    phi = phi_sum / n_samples
    theta /= theta.sum(axis=1, keepdims=True)
    phi /= phi.sum(axis=1, keepdims=True)
    config = asdict(cfg)
    config["alpha"] = alpha
    return TopicModel(theta, phi, "LDA", cfg.seed, config, matrix.vocab.terms, list(matrix.doc_ids), list(matrix.doc_years))
