import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from smoothcert.errors import BracketError, ConvergenceError, DomainError
from smoothcert.numerics import (
    Tolerance,
    binomial_upper_tail,
    bisect_root,
    clopper_pearson_lower,
    hoeffding_confidence,
    ln_gamma,
    log_binomial_upper_tail,
    maximize_1d,
    std_normal_cdf,
    std_normal_quantile,
)

mp.mp.dps = 40


@pytest.mark.parametrize("x", [1.0, 0.5, 5.0, 1e-3, 0.25, 17.3, 250.0])
def test_ln_gamma_matches_mpmath(x):
    assert ln_gamma(x) == pytest.approx(float(mp.loggamma(x)), rel=1e-13, abs=1e-14)


def test_ln_gamma_examples():
    assert ln_gamma(1.0) == 0.0
    assert ln_gamma(0.5) == pytest.approx(0.5723649429, abs=1e-10)
    assert ln_gamma(5.0) == pytest.approx(math.log(24), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, float("nan"), float("inf")])
def test_ln_gamma_domain(x):
    with pytest.raises(DomainError):
        ln_gamma(x)


@pytest.mark.parametrize("x", [-8.0, -1.3, 0.0, 0.4, 1.96, 6.0])
def test_normal_cdf_matches_mpmath(x):
    assert std_normal_cdf(x) == pytest.approx(float(mp.ncdf(x)), rel=1e-14, abs=1e-300)


def test_normal_cdf_symmetry():
    assert std_normal_cdf(0.0) == 0.5
    assert std_normal_cdf(1.96) == pytest.approx(0.9750021049, abs=1e-10)
    assert std_normal_cdf(-1.3) == pytest.approx(1 - std_normal_cdf(1.3), abs=1e-15)
    with pytest.raises(DomainError):
        std_normal_cdf(float("nan"))


@pytest.mark.parametrize("q", [1e-10, 0.01, 0.5, 0.9, 0.975, 0.999999])
def test_normal_quantile_matches_mpmath(q):
    ref = float(mp.sqrt(2) * mp.erfinv(2 * mp.mpf(q) - 1))
    assert std_normal_quantile(q) == pytest.approx(ref, rel=1e-13, abs=1e-15)


def test_normal_quantile_examples_and_domain():
    assert std_normal_quantile(0.5) == 0.0
    assert std_normal_quantile(0.9) == pytest.approx(1.2815515655, abs=1e-10)
    assert std_normal_quantile(0.975) == pytest.approx(1.9599639845, abs=1e-10)
    for q in (0.0, 1.0, -0.1, 2.0):
        with pytest.raises(DomainError):
            std_normal_quantile(q)


def test_bisect_examples():
    assert bisect_root(lambda x: x - 2, 0, 5) == pytest.approx(2.0, abs=1e-12)
    assert bisect_root(lambda x: x**3 - 8, 0, 5) == pytest.approx(2.0, abs=1e-12)
    r = bisect_root(lambda x: std_normal_cdf(x) - 0.9, 0, 10)
    assert r == pytest.approx(std_normal_quantile(0.9), abs=1e-11)


def test_bisect_errors():
    with pytest.raises(BracketError):
        bisect_root(lambda x: x * x + 1, -1, 1)
    with pytest.raises(DomainError):
        bisect_root(lambda x: x, 1, 0)
    with pytest.raises(ConvergenceError):
        bisect_root(lambda x: x - 0.3, 0, 1, Tolerance(abs_tol=1e-300, rel_tol=1e-300, max_iter=5))


def test_maximize_examples():
    x, f = maximize_1d(lambda x: -((x - 1) ** 2), 0, 3)
    assert x == pytest.approx(1.0, abs=1e-6) and f == pytest.approx(0.0, abs=1e-12)
    x, f = maximize_1d(math.sin, 0, math.pi)
    assert x == pytest.approx(math.pi / 2, abs=1e-6) and f == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(DomainError):
        maximize_1d(math.sin, 1, 1)


def test_maximize_lecuyer_objective_against_dense_scan():
    p1, p2 = 0.9, 0.1

    def obj(b):
        den = p1 - math.exp(2 * b) * p2
        return b / math.sqrt(2 * math.log(1.25 * (1 + math.exp(b)) / den)) if den > 0 else 0.0

    grid = np.arange(1e-4, 1.0 + 1e-12, 1e-4)
    scan = max(obj(b) for b in grid)
    _, best = maximize_1d(obj, 0.0, 1.0)
    assert best == pytest.approx(0.390, abs=5e-4)
    assert best >= scan - 1e-9


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 400), st.floats(0.01, 0.99), st.data())
def test_binomial_tail_matches_scipy(n, p, data):
    k = data.draw(st.integers(0, n))
    ref = stats.binom.sf(k - 1, n, p)
    got = binomial_upper_tail(k, n, p)
    assert got == pytest.approx(ref, rel=1e-9, abs=1e-300)


def test_log_tail_deep():
    # far tail underflows in linear space but not in log space
    ref = float(mp.log(mp.fsum(mp.binomial(2000, j) * mp.mpf("0.1") ** j * mp.mpf("0.9") ** (2000 - j) for j in range(1900, 2001))))
    assert log_binomial_upper_tail(1900, 2000, 0.1) == pytest.approx(ref, rel=1e-10)


def test_clopper_pearson_examples():
    assert clopper_pearson_lower(0, 100, 0.001) == 0.0
    assert clopper_pearson_lower(100, 100, 0.001) == pytest.approx(0.001 ** (1 / 100), rel=1e-14)
    assert clopper_pearson_lower(100, 100, 0.001) == pytest.approx(0.93325, abs=5e-6)
    assert clopper_pearson_lower(5, 10, 0.05) == pytest.approx(0.2224, abs=5e-5)
    assert clopper_pearson_lower(99_000, 100_000, 0.001) == pytest.approx(0.989, abs=1e-3)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3000), st.sampled_from([0.001, 0.01, 0.05, 0.3]), st.data())
def test_clopper_pearson_matches_beta_quantile(n, gamma, data):
    k = data.draw(st.integers(1, n - 1)) if n > 1 else 1
    ref = stats.beta.ppf(gamma, k, n - k + 1)
    assert clopper_pearson_lower(k, n, gamma) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_clopper_pearson_monotone_in_successes():
    vals = [clopper_pearson_lower(k, 200, 0.01) for k in range(201)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("args", [(1, 0, 0.1), (5, 3, 0.1), (-1, 3, 0.1), (1, 3, 0.0), (1, 3, 1.0)])
def test_clopper_pearson_domain(args):
    with pytest.raises(DomainError):
        clopper_pearson_lower(*args)


def test_hoeffding():
    assert hoeffding_confidence(10, 1000, 0.05) == pytest.approx(1 - 10 * math.exp(-5), rel=1e-14)
    assert hoeffding_confidence(2, 10**7, 0.1) == pytest.approx(1.0)
    assert hoeffding_confidence(2, 1, 10) == pytest.approx(1.0)
