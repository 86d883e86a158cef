"""lp certification from the generalized Gaussian KL budget.

With GN(0, sigma, p) smoothing the KL between shifted measures is a polynomial
in the ``||delta||_k`` (k of the same parity as p).  Keeping that polynomial
below the budget ``B = -log(2 sqrt(p1 p2) + 1 - p1 - p2)`` certifies the input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import special

from .divergences import KL, TopTwoProbs, lower_bound
from .errors import DomainError, SizeError
from .numerics import Tolerance, bisect_root
from .smoothing import kl_coefficient

_TOL = Tolerance(abs_tol=1e-300, rel_tol=1e-15, max_iter=2000)
_MAX_DOUBLINGS = 200

__all__ = [
    "FrontierPoint",
    "budget",
    "kl_coefficient",
    "active_orders",
    "radius_lp_closed_small",
    "radius_lp_naive",
    "radius_equal_eps",
    "companion_order",
    "companion_radius",
    "tradeoff_frontier",
    "vanishing_diagnostic",
    "linf_volume_ratio",
    "log_linf_volume_ratio",
    "coefficient_check",
]


@dataclass(frozen=True)
class FrontierPoint:
    eps_high: float
    eps_low: float


def budget(tt: TopTwoProbs) -> float:
    return lower_bound(KL, tt)


def active_orders(p: int) -> list[int]:
    """Norm orders with a non-zero KL coefficient: k <= p with p - k even."""
    return list(range(p % 2 or 2, p + 1, 2))


def _check_p(p: int):
    if int(p) != p or p < 1:
        raise DomainError(f"norm order must be a positive integer, got {p}")


def _solve_increasing(lhs, target: float, start: float) -> float:
    """Root of lhs(eps) = target for lhs increasing with lhs(0) = 0."""
    if target <= 0:
        return 0.0
    hi = start
    for _ in range(_MAX_DOUBLINGS):
        if lhs(hi) >= target:
            break
        hi *= 2.0
    else:
        raise DomainError("could not bracket the certified radius")
    return bisect_root(lambda e: lhs(e) - target, 0.0, hi, _TOL)


def radius_lp_closed_small(p: int, tt: TopTwoProbs, sigma: float) -> float:
    """(sigma^p B)^(1/p) for p in {1, 2}, where the KL has a single term."""
    if p not in (1, 2):
        raise DomainError("closed form exists only for p in {1, 2}; use radius_lp_naive")
    return (sigma**p * budget(tt)) ** (1.0 / p)


def naive_lhs(p: int, eps: float, sigma: float, d: int) -> float:
    """KL bound at ||delta||_p = eps using ||delta||_k <= d^(1/k - 1/p) eps."""
    r = eps / sigma
    return sum(kl_coefficient(p, k) * d ** (1.0 - k / p) * r**k for k in active_orders(p))


def radius_lp_naive(p: int, tt: TopTwoProbs, sigma: float, d: int) -> float:
    """lp radius that bounds every lower norm by the dimension-inflated lp norm."""
    _check_p(p)
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    return _solve_increasing(lambda e: naive_lhs(p, e, sigma, d), budget(tt), sigma)


def equal_eps_lhs(p: int, eps: float, sigma: float) -> float:
    r = eps / sigma
    return sum(kl_coefficient(p, k) * r**k for k in active_orders(p))


def radius_equal_eps(p: int, tt: TopTwoProbs, sigma: float) -> float:
    """Common radius eps certifying ||delta||_k < eps for every active k at once."""
    _check_p(p)
    return _solve_increasing(lambda e: equal_eps_lhs(p, e, sigma), budget(tt), sigma)


def companion_order(p: int) -> int:
    """The lower norm traded against l_p: l1 for p = 3, l2 for p = 4."""
    if p not in (3, 4):
        raise SizeError(f"two-norm trade-off is defined for p in {{3, 4}}, got {p}")
    return p - 2


def companion_radius(p: int, eps_high: float, tt: TopTwoProbs, sigma: float, d: int | None = None) -> float:
    """Largest companion-norm radius compatible with ``eps_high`` in l_p.

    Spends the budget left after the l_p term on the companion term; when
    ``d`` is given the result is also capped at ``d^(1/low - 1/p) eps_high``.
    """
    low = companion_order(p)
    left = budget(tt) - (eps_high / sigma) ** p
    if left <= 0:
        uncapped = 0.0
    else:
        uncapped = sigma * (left / kl_coefficient(p, low)) ** (1.0 / low)
    if d is None:
        return uncapped
    return min(uncapped, d ** (1.0 / low - 1.0 / p) * eps_high)


def tradeoff_frontier(p: int, tt: TopTwoProbs, sigma: float, d: int, n_points: int = 50) -> list[FrontierPoint]:
    """Pareto frontier between the l_p radius and its companion norm radius.

    Starts where the dimension cap on the companion radius stops binding
    (the largest attainable companion radius) and ends at the equal-eps point.
    Along the way ``eps_low`` is non-increasing and
    ``eps_high <= eps_low <= d^gap eps_high`` holds at every point.
    """
    low = companion_order(p)
    if n_points < 2:
        raise DomainError("need at least two frontier points")
    if d < 1:
        raise DomainError(f"dimension must be >= 1, got {d}")
    eq = radius_equal_eps(p, tt, sigma)
    if eq == 0:
        return [FrontierPoint(0.0, 0.0) for _ in range(n_points)]
    cap = d ** (1.0 / low - 1.0 / p)
    if cap == 1.0:
        start = eq
    else:
        start = bisect_root(
            lambda e: companion_radius(p, e, tt, sigma) - cap * e, 0.0, eq, _TOL
        )
    points = []
    for e in np.linspace(start, eq, n_points):
        e = float(e)
        lo_r = companion_radius(p, e, tt, sigma, d)
        points.append(FrontierPoint(e, max(lo_r, e)))
    return points


class VanishingReport(NamedTuple):
    points: list
    strictly_decreasing: bool


def vanishing_diagnostic(p_list, tt: TopTwoProbs, sigma: float) -> VanishingReport:
    """Equal-eps radius for each p; checks the sequence shrinks beyond p = 2."""
    ps = list(p_list)
    if ps != sorted(ps):
        raise DomainError("p_list must be ascending")
    points = [(p, radius_equal_eps(p, tt, sigma)) for p in ps]
    tail = [r for p, r in points if p >= 2]
    decreasing = all(b < a for a, b in zip(tail, tail[1:]))
    return VanishingReport(points, decreasing)


def log_linf_volume_ratio(p: float, d: int) -> float:
    """log of vol(unit l_p ball) / vol(unit l_inf ball); finite where the ratio underflows."""
    if not p >= 1 or d < 1:
        raise DomainError("need p >= 1 and d >= 1")
    return float(d * special.gammaln(1.0 + 1.0 / p) - special.gammaln(1.0 + d / p))


def linf_volume_ratio(p: float, d: int) -> float:
    """vol(unit l_p ball) / vol(unit l_inf ball) = Gamma(1 + 1/p)^d / Gamma(1 + d/p)."""
    return math.exp(log_linf_volume_ratio(p, d))


def coefficient_check(p_max: int = 64) -> list[tuple[int, int, float]]:
    """Active KL coefficients below 1 for p <= p_max (empty when the claim holds)."""
    out = []
    for p in range(1, p_max + 1):
        for k in active_orders(p):
            c = kl_coefficient(p, k)
            if c < 1.0:
                out.append((p, k, c))
    return out
