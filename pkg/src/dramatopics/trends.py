"""Per-topic prevalence series, OLS trend slopes and hot/cold classification."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .divergence import YearlyTopicSeries


class TrendError(ValueError):
    pass


@dataclass
class TrendResult:
    topic: int
    mean_prevalence: float
    slope: float
    intercept: float
    stderr: float
    t: float
    p: float
    delta: float
    n: int
    classification: str = "flat"


def topic_prevalence_series(series: YearlyTopicSeries, topic: int) -> list[tuple[int, float]]:
    K = series.distributions.shape[1]
    if not 0 <= topic < K:
        raise TrendError(f"topic {topic} out of range 0..{K - 1}")
    return [(y, float(v)) for y, v in zip(series.years, series.distributions[:, topic])]


def t_two_sided_p(t: float, df: int) -> float:
    if math.isinf(t):
        return 0.0
    if math.isnan(t):
        return 1.0
    return float(2.0 * stats.t.sf(abs(t), df))


def ols_trend(points, period: tuple[int, int] = (1700, 1900), topic: int = -1) -> TrendResult:
    """Regress value on year. delta is the slope times the period length."""
    pts = list(points)
    if len(pts) < 3:
        raise TrendError("OLS trend needs at least 3 points")
    x = np.array([p[0] for p in pts], dtype=np.float64)
    y = np.array([p[1] for p in pts], dtype=np.float64)
    if len(set(x.tolist())) != x.size:
        raise TrendError("years must be distinct")
    xc = x - x.mean()
    sxx = float(np.dot(xc, xc))
    if sxx == 0:
        raise TrendError("zero variance in years")
    slope = float(np.dot(xc, y - y.mean()) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (intercept + slope * x)
    n = x.size
    rss = float(np.dot(resid, resid))
    stderr = math.sqrt(rss / (n - 2) / sxx)
    if stderr > 0:
        t = slope / stderr
    else:
        t = math.copysign(math.inf, slope) if slope != 0 else math.nan
    return TrendResult(
        topic=topic,
        mean_prevalence=float(y.mean()),
        slope=slope,
        intercept=intercept,
        stderr=stderr,
        t=t,
        p=t_two_sided_p(t, n - 2),
        delta=slope * (period[1] - period[0]),
        n=n,
    )


def classify(result: TrendResult, significance: float = 0.05, delta_threshold: float = 0.1) -> str:
    if result.p < significance and result.delta >= delta_threshold:
        return "hot"
    if result.p < significance and result.delta <= -delta_threshold:
        return "cold"
    return "flat"


def analyze_trends(
    series: YearlyTopicSeries,
    period: tuple[int, int] = (1700, 1900),
    significance: float = 0.05,
    delta_threshold: float = 0.1,
    theta=None,
) -> list[TrendResult]:
    """Trend and label for every topic.

    mean_prevalence is the mean of theta over documents when theta is given,
    otherwise the mean over the yearly series.
    """
    out = []
    doc_means = None if theta is None else np.asarray(theta).mean(axis=0)
    for k in range(series.distributions.shape[1]):
        res = ols_trend(topic_prevalence_series(series, k), period, topic=k)
        if doc_means is not None:
            res.mean_prevalence = float(doc_means[k])
        res.classification = classify(res, significance, delta_threshold)
        out.append(res)
    return out
