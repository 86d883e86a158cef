"""Special functions, 1-D solvers and binomial confidence bounds.

The special functions are thin validated wrappers over :mod:`scipy.special`;
the solvers and the Clopper-Pearson bound are implemented here so that their
behaviour (determinism, error reporting) is fully under our control.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import special

from .errors import BracketError, ConvergenceError, DomainError

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Tolerance:
    abs_tol: float = 1e-12
    rel_tol: float = 1e-12
    max_iter: int = 500

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise DomainError("tolerances must be positive")
        if self.max_iter < 1:
            raise DomainError("max_iter must be >= 1")

    def done(self, lo: float, hi: float) -> bool:
        mid = 0.5 * (lo + hi)
        return abs(hi - lo) <= self.abs_tol + self.rel_tol * abs(mid)


DEFAULT_TOL = Tolerance()


def _check_finite(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return arr


def _scalar_or_array(arr):
    return float(arr) if arr.ndim == 0 else arr


def ln_gamma(x):
    """Natural log of the gamma function for positive real ``x``."""
    arr = _check_finite(x)
    if np.any(arr <= 0):
        raise DomainError(f"ln_gamma requires x > 0, got {x!r}")
    return _scalar_or_array(special.gammaln(arr))


def std_normal_cdf(x):
    arr = _check_finite(x)
    return _scalar_or_array(special.ndtr(arr))


def std_normal_quantile(q):
    arr = _check_finite(q, "q")
    if np.any((arr <= 0) | (arr >= 1)):
        raise DomainError(f"quantile requires 0 < q < 1, got {q!r}")
    return _scalar_or_array(special.ndtri(arr))


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = DEFAULT_TOL,
) -> float:
    """Root of a continuous monotone ``f`` bracketed by ``[lo, hi]``.

    Raises :class:`BracketError` when ``f(lo)`` and ``f(hi)`` share a sign and
    :class:`ConvergenceError` when ``tol.max_iter`` halvings do not suffice.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if math.isnan(flo) or math.isnan(fhi) or (flo > 0) == (fhi > 0):
        raise BracketError(f"no sign change on [{lo}, {hi}]: f={flo}, {fhi}")
    for _ in range(tol.max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi or tol.done(lo, hi):
            return mid
        fmid = f(mid)
        if fmid == 0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    raise ConvergenceError(f"bisection did not converge in {tol.max_iter} iterations")


def maximize_1d(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: Tolerance = DEFAULT_TOL,
    grid: int = 32,
) -> tuple[float, float]:
    """Maximize ``f`` on ``[lo, hi]``.

    A uniform scan over ``grid`` cells locates the best cell, then
    golden-section search refines inside its two neighbouring cells.  The
    returned value is always an actual evaluation of ``f``, so for
    multimodal ``f`` it is still a lower bound on the supremum.
    """
    if not lo < hi:
        raise DomainError(f"need lo < hi, got [{lo}, {hi}]")
    xs = np.linspace(lo, hi, grid + 1)
    vals = np.array([f(float(x)) for x in xs])
    vals = np.where(np.isnan(vals), -np.inf, vals)
    i = int(np.argmax(vals))
    best_x, best_f = float(xs[i]), float(vals[i])
    a, b = float(xs[max(i - 1, 0)]), float(xs[min(i + 1, grid)])

    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(tol.max_iter):
        if tol.done(a, b):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
        for x, fx in ((c, fc), (d, fd)):
            if fx > best_f:
                best_x, best_f = x, fx
    return best_x, best_f


def log_binomial_upper_tail(successes: int, trials: int, p: float) -> float:
    """log P[Bin(trials, p) >= successes], summed term by term in log space."""
    k, n = int(successes), int(trials)
    if n < 1 or not 0 <= k <= n:
        raise DomainError(f"need 0 <= successes <= trials, trials >= 1; got {k}, {n}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if k == 0 or p == 1.0:
        return 0.0
    if p == 0.0:
        return -math.inf
    log_first = (
        special.gammaln(n + 1)
        - special.gammaln(k + 1)
        - special.gammaln(n - k + 1)
        + k * math.log(p)
        + (n - k) * math.log1p(-p)
    )
    if k == n:
        return float(log_first)
    # ratio pmf(i+1)/pmf(i) = (n-i)/(i+1) * p/(1-p)
    i = np.arange(k, n, dtype=float)
    steps = np.log((n - i) / (i + 1.0)) + (math.log(p) - math.log1p(-p))
    logs = log_first + np.concatenate(([0.0], np.cumsum(steps)))
    return float(min(special.logsumexp(logs), 0.0))


def binomial_upper_tail(successes: int, trials: int, p: float) -> float:
    return math.exp(log_binomial_upper_tail(successes, trials, p))


def clopper_pearson_lower(successes: int, trials: int, gamma: float) -> float:
    """One-sided exact lower confidence bound on a binomial proportion.

    Returns ``p_lo`` with ``P[Bin(trials, p_lo) >= successes] = gamma``, so the
    true proportion is at least ``p_lo`` with probability ``>= 1 - gamma``.
    """
    if not 0.0 < gamma < 1.0:
        raise DomainError(f"gamma must lie in (0, 1), got {gamma}")
    if trials < 1 or not 0 <= successes <= trials:
        raise DomainError(f"need 0 <= successes <= trials, trials >= 1; got {successes}, {trials}")
    return _cp_lower(int(successes), int(trials), float(gamma))


@lru_cache(maxsize=4096)
def _cp_lower(k: int, n: int, gamma: float) -> float:
    if k == 0:
        return 0.0
    if k == n:
        return gamma ** (1.0 / n)
    log_gamma = math.log(gamma)
    return bisect_root(
        lambda p: log_binomial_upper_tail(k, n, p) - log_gamma,
        0.0,
        1.0,
        Tolerance(abs_tol=1e-13, rel_tol=1e-13, max_iter=200),
    )


def hoeffding_confidence(num_classes: int, samples: int, eps: float) -> float:
    """Confidence ``1 - c exp(-2 n eps^2)`` of a Hoeffding estimate, floored at 0."""
    if num_classes < 2 or samples < 1 or not eps > 0:
        raise DomainError("need num_classes >= 2, samples >= 1, eps > 0")
    return max(0.0, 1.0 - num_classes * math.exp(-2.0 * samples * eps * eps))
