import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize, special

from smoothcert import lp
from smoothcert.divergences import TopTwoProbs
from smoothcert.errors import DomainError, SizeError

TT = TopTwoProbs(0.99, 0.01)


def test_budget_examples():
    assert lp.budget(TopTwoProbs(0.5, 0.5)) == pytest.approx(0.0, abs=1e-15)
    assert lp.budget(TT) == pytest.approx(-math.log(2 * math.sqrt(0.0099)), rel=1e-14)
    ref = -mp.log(2 * mp.sqrt(mp.mpf("0.99") * mp.mpf("0.01")))
    assert lp.budget(TT) == pytest.approx(float(ref), rel=1e-14)
    assert lp.budget(TT) == pytest.approx(1.614463, abs=1e-6)
    assert lp.budget(TopTwoProbs(0.9, 0.1)) == pytest.approx(0.51083, abs=1e-5)


def test_active_orders():
    assert lp.active_orders(1) == [1]
    assert lp.active_orders(4) == [2, 4]
    assert lp.active_orders(7) == [1, 3, 5, 7]


def test_closed_small_examples():
    assert lp.radius_lp_closed_small(1, TopTwoProbs(0.9, 0.1), 1.0) == pytest.approx(0.51083, abs=1e-5)
    assert lp.radius_lp_closed_small(2, TopTwoProbs(0.9, 0.1), 1.0) == pytest.approx(0.71472, abs=1e-5)
    assert lp.radius_lp_closed_small(1, TT, 0.25) == pytest.approx(0.40362, abs=1e-5)
    with pytest.raises(DomainError):
        lp.radius_lp_closed_small(3, TT, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.51, 0.999), st.floats(0.05, 4.0), st.integers(1, 5000))
def test_naive_matches_closed_small(p1, sigma, d):
    tt = TopTwoProbs.binary(p1)
    for p in (1, 2):
        assert lp.radius_lp_naive(p, tt, sigma, d) == pytest.approx(lp.radius_lp_closed_small(p, tt, sigma), rel=1e-9)


def test_naive_examples():
    eq3 = lp.radius_lp_naive(3, TT, 1.0, 1)
    ref = optimize.brentq(lambda e: e**3 + 3 / special.gamma(1 / 3) * e - lp.budget(TT), 0, 2, xtol=1e-15)
    assert eq3 == pytest.approx(ref, rel=1e-12)
    assert eq3 == pytest.approx(0.865, abs=1e-3)
    assert 0 < lp.radius_lp_naive(4, TT, 1.0, 3072) < lp.radius_lp_naive(4, TT, 1.0, 1)
    assert lp.radius_lp_naive(3, TopTwoProbs(0.5, 0.5), 1.0, 10) == 0.0
    with pytest.raises(DomainError):
        lp.radius_lp_naive(3, TT, 1.0, 0)


def test_equal_eps_examples():
    assert lp.radius_equal_eps(3, TT, 1.0) == pytest.approx(0.865, abs=0.005)
    assert lp.radius_equal_eps(1, TT, 0.7) == pytest.approx(0.7 * lp.budget(TT), rel=1e-13)
    assert lp.radius_equal_eps(2, TT, 0.7) == pytest.approx(0.7 * math.sqrt(lp.budget(TT)), rel=1e-13)
    with pytest.raises(DomainError):
        lp.radius_equal_eps(2.5, TT, 1.0)


@pytest.mark.parametrize("p", [3, 5, 6, 9])
def test_equal_eps_against_polynomial_root(p):
    # independent coefficients from mpmath and a numpy polynomial root
    import numpy as np

    coeffs = np.zeros(p + 1)
    for k in lp.active_orders(p):
        coeffs[p - k] = float(mp.binomial(p, k) * mp.gamma(mp.mpf(p - k + 1) / p) / mp.gamma(mp.mpf(1) / p))
    coeffs[-1] = -lp.budget(TT)
    roots = [r.real for r in np.roots(coeffs) if abs(r.imag) < 1e-9 and r.real > 0]
    assert lp.radius_equal_eps(p, TT, 1.0) == pytest.approx(min(roots), rel=1e-9)


def test_companion_examples():
    B = lp.budget(TT)
    assert lp.companion_radius(3, 0.0, TT, 1.0) == pytest.approx(B * special.gamma(1 / 3) / 3, rel=1e-13)
    assert lp.companion_radius(3, 0.0, TT, 1.0) == pytest.approx(1.4417, abs=1e-4)
    eq = lp.radius_equal_eps(3, TT, 1.0)
    assert lp.companion_radius(3, eq, TT, 1.0) == pytest.approx(eq, rel=1e-10)
    ref4 = math.sqrt(B * special.gamma(0.25) / (6 * special.gamma(0.75)))
    assert lp.companion_radius(4, 0.0, TT, 1.0) == pytest.approx(ref4, rel=1e-13)
    assert lp.companion_radius(3, 0.1, TT, 1.0, d=1) == pytest.approx(0.1)
    with pytest.raises(SizeError):
        lp.companion_order(5)


@pytest.mark.parametrize("p", [3, 4])
@pytest.mark.parametrize("d", [1, 16, 3072])
def test_frontier_shape(p, d):
    front = lp.tradeoff_frontier(p, TT, 1.0, d, 40)
    eq = lp.radius_equal_eps(p, TT, 1.0)
    assert len(front) == 40
    assert front[-1].eps_high == pytest.approx(eq) and front[-1].eps_low == pytest.approx(eq)
    gap = d ** (1 / (p - 2) - 1 / p)
    for a, b in zip(front, front[1:]):
        assert b.eps_high >= a.eps_high and b.eps_low <= a.eps_low + 1e-12
    for pt in front:
        assert pt.eps_high - 1e-12 <= pt.eps_low <= gap * pt.eps_high * (1 + 1e-9) + 1e-12
        # each point spends at most the budget
        used = (pt.eps_high) ** p + lp.kl_coefficient(p, p - 2) * pt.eps_low ** (p - 2)
        assert used <= lp.budget(TT) * (1 + 1e-9)


def test_frontier_paper_numbers():
    front = lp.tradeoff_frontier(3, TT, 1.0, 3072, 50)
    assert front[-1].eps_high == pytest.approx(0.86, abs=0.01)
    assert front[0].eps_low == pytest.approx(1.44, abs=0.01)


def test_frontier_start_is_naive_radius():
    front = lp.tradeoff_frontier(4, TT, 1.0, 3072, 5)
    assert front[0].eps_high == pytest.approx(lp.radius_lp_naive(4, TT, 1.0, 3072), rel=1e-9)


def test_frontier_d1_is_diagonal_and_errors():
    for pt in lp.tradeoff_frontier(3, TT, 1.0, 1, 7):
        assert pt.eps_low == pt.eps_high
    assert len(lp.tradeoff_frontier(3, TT, 1.0, 3072, 2)) == 2
    with pytest.raises(SizeError):
        lp.tradeoff_frontier(5, TT, 1.0, 10)
    with pytest.raises(DomainError):
        lp.tradeoff_frontier(3, TT, 1.0, 10, 1)


def test_vanishing_diagnostic():
    rep = lp.vanishing_diagnostic(range(2, 21, 2), TT, 1.0)
    assert rep.strictly_decreasing
    assert rep.points[1][1] < rep.points[0][1]
    zero = lp.vanishing_diagnostic([2, 4, 6], TopTwoProbs(0.5, 0.5), 1.0)
    assert all(r == 0 for _, r in zero.points)
    with pytest.raises(DomainError):
        lp.vanishing_diagnostic([4, 2], TT, 1.0)


def test_volume_ratio():
    assert lp.linf_volume_ratio(7.0, 1) == pytest.approx(1.0, rel=1e-14)
    assert lp.linf_volume_ratio(1e6 * 50, 50) == pytest.approx(1.0, abs=1e-6)
    r = lp.linf_volume_ratio(9 * 150528, 150528)
    ref = mp.exp(150528 * mp.loggamma(1 + mp.mpf(1) / (9 * 150528)) - mp.loggamma(1 + mp.mpf(1) / 9))
    assert r == pytest.approx(float(ref), rel=1e-9)
    assert 0.985 <= r <= 0.995
    vals = [lp.linf_volume_ratio(p, 100) for p in (1, 2, 5, 20, 100, 1e4)]
    assert all(b > a for a, b in zip(vals, vals[1:]))
    logs = [lp.log_linf_volume_ratio(p, 150528) for p in (1, 2, 10, 1e3, 1e6)]
    assert all(b > a for a, b in zip(logs, logs[1:]))
    assert lp.log_linf_volume_ratio(1, 3) == pytest.approx(math.log(1 / 6), rel=1e-14)


def test_coefficient_claim_holds():
    assert lp.coefficient_check(64) == []
