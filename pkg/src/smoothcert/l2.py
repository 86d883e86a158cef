"""Certified l2 radii under Gaussian smoothing.

``radius_generic`` inverts ``g(delta, std) = h(p1, p2)`` numerically and is the
source of truth.  ``radius_closed`` evaluates the tabulated closed forms, where
the KL row is written in the GN scale convention (std = sigma / sqrt 2) and
every other row uses the Gaussian standard deviation directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from . import divergences as dv
from .divergences import Divergence, TopTwoProbs, lower_bound
from .errors import DomainError
from .numerics import Tolerance, bisect_root, maximize_1d, std_normal_quantile
from .smoothing import gaussian_divergence, gn_scale_to_std

_ROOT_TOL = Tolerance(abs_tol=1e-300, rel_tol=1e-15, max_iter=2000)
_RENYI_ALPHA_MIN = 1.0 + 1e-6
_RENYI_ALPHA_MAX = 1e3

BASELINES = ("cohen", "lecuyer_l2", "lecuyer_l1", "li_l1")


@dataclass(frozen=True)
class L2Certificate:
    method: str
    radius: float
    tt: TopTwoProbs
    sigma: float
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.radius < 0:
            raise DomainError("radius must be non-negative")


def closed_form_std(kind: Divergence, sigma: float) -> float:
    """Gaussian std implied by the tabulated closed form for ``kind`` at scale ``sigma``."""
    return gn_scale_to_std(sigma) if kind.name == "kl" else sigma


def radius_generic(kind: Divergence, tt: TopTwoProbs, std: float) -> float:
    """Largest delta with gaussian_divergence(kind, delta, std) <= lower_bound(kind, tt)."""
    if not std > 0:
        raise DomainError(f"std must be positive, got {std}")
    h = lower_bound(kind, tt)
    if h <= 0:
        return 0.0

    def excess(delta):
        return gaussian_divergence(kind, delta, std) - h

    hi = std
    while excess(hi) < 0:
        hi *= 2.0
        if hi > 1e300:
            raise DomainError("divergence budget is not reachable")
    return bisect_root(excess, 0.0, hi, _ROOT_TOL)


def radius_closed(kind: Divergence, tt: TopTwoProbs, sigma: float) -> float:
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    p1, p2 = tt.p1, tt.p2
    if p1 == p2:
        return 0.0
    name = kind.name
    if name == "kl":
        return math.sqrt(sigma**2 * lower_bound(kind, tt))
    if name == "renyi":
        return math.sqrt(2.0 * sigma**2 / kind.alpha * lower_bound(kind, tt))
    if name == "hellinger2":
        inner = math.sqrt(1.0 - (math.sqrt(p1) - math.sqrt(p2)) ** 2 / 2.0)
        return math.sqrt(-8.0 * sigma**2 * math.log(inner))
    if name == "chi2":
        s = p1 + p2
        return math.sqrt(sigma**2 * math.log(s / (s - (p1 - p2) ** 2)))
    if name == "bhattacharyya":
        return math.sqrt(8.0 * sigma**2 * dv.bhattacharyya_table_form(tt))
    # inverting 2 Phi(delta / 2 sigma) - 1 <= |p1 - p2| / 2
    return 2.0 * sigma * std_normal_quantile(abs(p1 - p2) / 4.0 + 0.5)


def tv_radius_as_printed(tt: TopTwoProbs, sigma: float) -> float:
    """The TV radius with |p1 - p2| / 2 inside Phi^-1; it exceeds the tight radius for large p1."""
    return 2.0 * sigma * std_normal_quantile(abs(tt.p1 - tt.p2) / 2.0 + 0.5)


def _renyi_radius_at(tt: TopTwoProbs, sigma: float, alpha: float) -> float:
    return radius_closed(dv.renyi(alpha), tt, sigma)


def renyi_sup(tt: TopTwoProbs, sigma: float) -> tuple[float, float]:
    """(alpha*, radius) maximizing the Renyi radius over log-spaced alpha in (1, 1e3]."""
    if tt.p1 == tt.p2:
        return _RENYI_ALPHA_MIN, 0.0
    u, r = maximize_1d(
        lambda u: _renyi_radius_at(tt, sigma, math.exp(u)),
        math.log(_RENYI_ALPHA_MIN),
        math.log(_RENYI_ALPHA_MAX),
        Tolerance(abs_tol=1e-12, rel_tol=1e-12),
        grid=64,
    )
    return math.exp(u), r


def radius_renyi_sup(tt: TopTwoProbs, sigma: float) -> float:
    return renyi_sup(tt, sigma)[1]


def radius_cohen(tt: TopTwoProbs, sigma: float) -> float:
    if not (0.0 < tt.p2 <= tt.p1 < 1.0):
        raise DomainError(f"Cohen radius needs 0 < p2 <= p1 < 1, got ({tt.p1}, {tt.p2})")
    if tt.p1 == tt.p2:
        return 0.0
    return sigma / 2.0 * (std_normal_quantile(tt.p1) - std_normal_quantile(tt.p2))


def _lecuyer_objective(beta: float, p1: float, p2: float, sigma: float) -> float:
    denom = p1 - math.exp(2.0 * beta) * p2
    if beta <= 0 or denom <= 0:
        return 0.0
    return sigma * beta / math.sqrt(2.0 * math.log(1.25 * (1.0 + math.exp(beta)) / denom))


def radius_lecuyer_l2(tt: TopTwoProbs, sigma: float) -> float:
    p1, p2 = tt.p1, tt.p2
    if not p2 > 0:
        raise DomainError("Lecuyer l2 radius needs p2 > 0")
    if p1 <= p2:
        return 0.0
    upper = min(1.0, 0.5 * math.log(p1 / p2))
    if upper <= 0:
        return 0.0
    _, best = maximize_1d(lambda b: _lecuyer_objective(b, p1, p2, sigma), 0.0, upper)
    return max(0.0, best)


def radius_baselines_l1(tt: TopTwoProbs, sigma: float) -> tuple[float, float]:
    """(Lecuyer, Li) l1 radii under Laplace smoothing of scale ``sigma``.

    Li's radius is ``-sigma log(1 - p1 + p2)``, which is positive for p1 > p2.
    """
    p1, p2 = tt.p1, tt.p2
    if not p2 > 0:
        raise DomainError("l1 baselines need p2 > 0")
    if p1 == p2:
        return 0.0, 0.0
    return sigma / 2.0 * math.log(p1 / p2), -sigma * math.log1p(-(p1 - p2))


def li_l1_as_printed(tt: TopTwoProbs, sigma: float) -> float:
    return sigma * math.log1p(-(tt.p1 - tt.p2))


def certify_l2(method: str, tt: TopTwoProbs, sigma: float, alpha: Optional[float] = None) -> L2Certificate:
    """Dispatch by method name: a divergence name, ``renyi_sup`` or a baseline tag."""
    key = method.lower().replace("-", "_")
    extra = {}
    if key == "renyi_sup":
        a, r = renyi_sup(tt, sigma)
        extra["alpha"] = a
    elif key == "cohen":
        r = radius_cohen(tt, sigma)
    elif key == "lecuyer_l2":
        r = radius_lecuyer_l2(tt, sigma)
    elif key == "lecuyer_l1":
        r = radius_baselines_l1(tt, sigma)[0]
    elif key == "li_l1":
        r = radius_baselines_l1(tt, sigma)[1]
    else:
        r = radius_closed(Divergence.parse(method, alpha), tt, sigma)
    return L2Certificate(key, r, tt, sigma, extra)


VERDICTS = (
    "renyi>chi2",
    "chi2>kl",
    "chi2>hellinger2",
    "bhattacharyya==hellinger2",
    "hellinger2>kl",
    "kl>lecuyer",
)


@dataclass
class HierarchyRow:
    p1: float
    radii: dict
    verdicts: dict


def hierarchy_row(p1: float, sigma: float = 1.0, eq_tol: float = 1e-9) -> HierarchyRow:
    if not 0.5 < p1 < 1.0:
        raise DomainError(f"p1 must lie in (0.5, 1), got {p1}")
    tt = TopTwoProbs.binary(p1)
    radii = {
        "kl": radius_closed(dv.KL, tt, sigma),
        "hellinger2": radius_closed(dv.HELLINGER2, tt, sigma),
        "chi2": radius_closed(dv.CHI2, tt, sigma),
        "bhattacharyya": radius_closed(dv.BHATTACHARYYA, tt, sigma),
        "tv": radius_closed(dv.TV, tt, sigma),
        "renyi_sup": radius_renyi_sup(tt, sigma),
        "lecuyer": radius_lecuyer_l2(tt, sigma),
        "cohen": radius_cohen(tt, sigma),
    }
    verdicts = {
        "renyi>chi2": radii["renyi_sup"] > radii["chi2"],
        "chi2>kl": radii["chi2"] > radii["kl"],
        "chi2>hellinger2": radii["chi2"] > radii["hellinger2"],
        "bhattacharyya==hellinger2": abs(radii["bhattacharyya"] - radii["hellinger2"]) <= eq_tol,
        "hellinger2>kl": radii["hellinger2"] > radii["kl"],
        "kl>lecuyer": radii["kl"] > radii["lecuyer"],
    }
    return HierarchyRow(p1, radii, verdicts)


def hierarchy_report(p1_grid, sigma: float = 1.0) -> list[HierarchyRow]:
    """All radii and the six pairwise verdicts on a binary (p2 = 1 - p1) grid."""
    grid = list(p1_grid)
    if any(not 0.5 < p < 1.0 for p in grid):
        raise DomainError("p1 grid must lie inside (0.5, 1)")
    return [hierarchy_row(p, sigma) for p in grid]


def hellinger_kl_crossover(sigma: float = 1.0) -> float:
    """p1 above which the Hellinger radius drops below the KL radius (binary case)."""

    def gap(p1):
        tt = TopTwoProbs.binary(p1)
        return radius_closed(dv.HELLINGER2, tt, sigma) - radius_closed(dv.KL, tt, sigma)

    return bisect_root(gap, 0.9, 1.0 - 1e-9)
