"""KL and Jensen-Shannon divergence (base 2) and the consecutive-year JSD series."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


class DivergenceError(ValueError):
    pass


def _pair(p, q) -> tuple[np.ndarray, np.ndarray]:
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape or p.ndim != 1:
        raise DivergenceError(f"length mismatch: {p.shape} vs {q.shape}")
    return p, q


def kl_divergence(p, q) -> float:
    """sum over p_i > 0 of p_i log2(p_i / q_i); inf if q vanishes on p's support."""
    p, q = _pair(p, q)
    support = p > 0
    if (q[support] <= 0).any():
        return math.inf
    ps, qs = p[support], q[support]
    return float(np.sum(ps * np.log2(ps / qs)))


def jsd(p, q) -> float:
    """Half KL(p||m) plus half KL(q||m), m the midpoint. In [0, 1] bits."""
    p, q = _pair(p, q)
    s = p + q
    # p/m is evaluated as 2p/(p+q): m itself can underflow to zero for subnormal inputs.
    # p + q is commutative bitwise and the halves are summed in a fixed order,
    # so jsd(p, q) == jsd(q, p) exactly.
    a = _half_term(p, s)
    b = _half_term(q, s)
    lo, hi = (a, b) if a <= b else (b, a)
    # rounding can stray just outside the true range [0, 1]
    return min(max(0.5 * lo + 0.5 * hi, 0.0), 1.0)


def _half_term(p: np.ndarray, s: np.ndarray) -> float:
    support = p > 0
    ps = p[support]
    return float(np.sum(ps * np.log2(2.0 * ps / s[support])))


@dataclass
class YearlyTopicSeries:
    years: list[int]
    distributions: np.ndarray  # n_years x K
    doc_counts: list[int]

    def __post_init__(self):
        self.distributions = np.asarray(self.distributions, dtype=np.float64)
        if any(b <= a for a, b in zip(self.years, self.years[1:])):
            raise DivergenceError("years must be strictly increasing")
        if len(self.years) != self.distributions.shape[0] or len(self.years) != len(self.doc_counts):
            raise DivergenceError("years, distributions and doc_counts disagree in length")

    def get(self, year: int) -> np.ndarray:
        return self.distributions[self.years.index(year)]


def yearly_distributions(theta, doc_years, weights=None) -> YearlyTopicSeries:
    """Mean topic distribution per calendar year.

    The mean is unweighted over documents unless `weights` (e.g. token counts
    per document) is given. Years without documents are simply absent.
    """
    theta = np.asarray(theta, dtype=np.float64)
    years = np.asarray(doc_years)
    if theta.shape[0] == 0:
        raise DivergenceError("no documents to aggregate")
    if theta.shape[0] != years.size:
        raise DivergenceError("doc_years must align with theta rows")
    w = np.ones(years.size) if weights is None else np.asarray(weights, dtype=np.float64)
    uniq = sorted(set(int(y) for y in years))
    out = np.empty((len(uniq), theta.shape[1]))
    counts = []
    for i, y in enumerate(uniq):
        mask = years == y
        wy = w[mask]
        out[i] = (wy[:, None] * theta[mask]).sum(axis=0) / wy.sum()
        counts.append(int(mask.sum()))
    return YearlyTopicSeries(uniq, out, counts)


@dataclass
class JsdSeries:
    year_pairs: list[tuple[int, int]]
    values: list[float]

    @property
    def gaps(self) -> list[int]:
        return [b - a for a, b in self.year_pairs]

    def argmax_pair(self) -> tuple[int, int]:
        return self.year_pairs[int(np.argmax(self.values))]


def jsd_series(series: YearlyTopicSeries) -> JsdSeries:
    """JSD between each pair of consecutive years present in the series."""
    if len(series.years) < 2:
        raise DivergenceError("need at least two years for a JSD series")
    pairs = list(zip(series.years, series.years[1:]))
    values = [jsd(series.distributions[i], series.distributions[i + 1]) for i in range(len(pairs))]
    return JsdSeries(pairs, values)


def rolling_mean(values, window: int) -> np.ndarray:
    """Centered rolling mean for plotting; edges use the available neighbours."""
    values = np.asarray(values, dtype=np.float64)
    if window <= 1:
        return values.copy()
    half = window // 2
    out = np.empty_like(values)
    for i in range(values.size):
        out[i] = values[max(0, i - half): i + half + 1].mean()
    return out
