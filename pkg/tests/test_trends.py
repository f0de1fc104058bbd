import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dramatopics.divergence import YearlyTopicSeries, yearly_distributions
from dramatopics.trends import (
    TrendError,
    TrendResult,
    analyze_trends,
    classify,
    ols_trend,
    t_two_sided_p,
    topic_prevalence_series,
)

mpmath.mp.dps = 30


def t_p_oracle(t, df):
    """Two-sided p by quadrature of the Student-t density."""
    nu = mpmath.mpf(df)
    c = mpmath.gamma((nu + 1) / 2) / (mpmath.sqrt(nu * mpmath.pi) * mpmath.gamma(nu / 2))
    pdf = lambda x: c * (1 + x * x / nu) ** (-(nu + 1) / 2)
    return float(2 * mpmath.quad(pdf, [abs(t), mpmath.inf]))


def test_prevalence_series():
    s = YearlyTopicSeries([1700], [[0.3, 0.7]], [1])
    assert topic_prevalence_series(s, 0) == [(1700, 0.3)]
    with pytest.raises(TrendError):
        topic_prevalence_series(s, 2)


def test_prevalence_uniform():
    s = YearlyTopicSeries(list(range(1700, 1710)), np.full((10, 10), 0.1), [1] * 10)
    assert all(v == 0.1 for _, v in topic_prevalence_series(s, 4))


def test_prevalence_matches_indexing():
    rng = np.random.default_rng(0)
    dist = rng.dirichlet(np.ones(4), size=12)
    s = YearlyTopicSeries(list(range(1800, 1812)), dist, [1] * 12)
    for k in range(4):
        assert topic_prevalence_series(s, k) == [(1800 + i, float(dist[i, k])) for i in range(12)]


def test_constant_series():
    r = ols_trend([(y, 0.2) for y in range(1700, 1901)])
    assert r.slope == 0.0
    assert r.delta == 0.0


def test_exact_line():
    r = ols_trend([(y, 0.001 * (y - 1700)) for y in range(1700, 1901)], (1700, 1900))
    assert r.slope == pytest.approx(0.001, abs=1e-12)
    assert r.delta == pytest.approx(0.2, abs=1e-12)
    assert r.stderr == pytest.approx(0.0, abs=1e-12)


def test_noisy_against_closed_form():
    rng = np.random.default_rng(5)
    x = np.arange(1700, 1750)
    y = 0.3 - 0.002 * (x - 1700) + rng.normal(0, 0.01, x.size)
    r = ols_trend(list(zip(x, y)))
    slope, intercept = np.polyfit(x, y, 1)
    assert r.slope == pytest.approx(slope, rel=1e-9)
    assert r.intercept == pytest.approx(intercept, rel=1e-9)
    assert r.p == pytest.approx(t_p_oracle(r.t, x.size - 2), abs=1e-6)


@pytest.mark.parametrize("t,df", [(2.0, 60), (1.0, 5), (3.5, 12), (0.2, 198), (-2.5, 30)])
def test_t_pvalue_matches_quadrature(t, df):
    assert t_two_sided_p(t, df) == pytest.approx(t_p_oracle(t, df), abs=1e-6)


def test_tabulated_t_value():
    assert t_two_sided_p(2.0, 60) == pytest.approx(0.0500, abs=2e-4)


def test_errors():
    with pytest.raises(TrendError):
        ols_trend([(1700, 0.1), (1701, 0.2)])
    with pytest.raises(TrendError):
        ols_trend([(1700, 0.1), (1700, 0.2), (1700, 0.3)])


@settings(max_examples=100, deadline=None)
@given(st.floats(-0.01, 0.01), st.floats(-1, 1), st.floats(-5, 5))
def test_noiseless_and_shift(slope, intercept, shift):
    pts = [(y, intercept + slope * (y - 1700)) for y in range(1700, 1760, 3)]
    r = ols_trend(pts)
    assert r.slope == pytest.approx(slope, abs=1e-12)
    r2 = ols_trend([(y, v + shift) for y, v in pts])
    assert r2.slope == pytest.approx(r.slope, abs=1e-12)


def _res(delta, p):
    return TrendResult(0, 0.1, delta / 200, 0.0, 0.0, 0.0, p, delta, 10)


def test_classify():
    assert classify(_res(0.37, 1e-4)) == "hot"
    assert classify(_res(0.0, 0.9)) == "flat"
    assert classify(_res(-0.13, 0.01), delta_threshold=0.1) == "cold"
    assert classify(_res(-0.13, 0.01), delta_threshold=0.15) == "flat"
    assert classify(_res(0.5, 0.2)) == "flat"


def test_deltas_sum_to_zero():
    rng = np.random.default_rng(9)
    theta = rng.dirichlet(np.ones(10) * 0.3, size=300)
    years = rng.integers(1700, 1901, size=300)
    series = yearly_distributions(theta, years)
    res = analyze_trends(series, theta=theta)
    assert abs(sum(r.slope for r in res)) <= 1e-9
    assert abs(sum(r.delta for r in res)) <= 1e-7
    assert sum(r.mean_prevalence for r in res) == pytest.approx(1.0)
