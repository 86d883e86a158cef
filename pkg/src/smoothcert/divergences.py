"""Lower bounds on divergences between multinomials that disagree on the argmax.

Every bound ``h(p1, p2)`` depends only on the two largest probabilities of
``P``.  Alongside each closed form we expose the distribution ``Q`` that
attains it and a grid-search oracle that minimizes ``d(Q, P)`` directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from .errors import DomainError, SizeError

_PROB_SLACK = 1e-12


@dataclass(frozen=True)
class TopTwoProbs:
    p1: float
    p2: float

    def __post_init__(self):
        p1, p2 = self.p1, self.p2
        if not (math.isfinite(p1) and math.isfinite(p2)):
            raise DomainError(f"probabilities must be finite, got ({p1}, {p2})")
        if not (1.0 + _PROB_SLACK >= p1 >= p2 >= -_PROB_SLACK):
            raise DomainError(f"need 1 >= p1 >= p2 >= 0, got ({p1}, {p2})")
        if p1 + p2 > 1.0 + _PROB_SLACK:
            raise DomainError(f"need p1 + p2 <= 1, got ({p1}, {p2})")

    @classmethod
    def binary(cls, p1: float) -> "TopTwoProbs":
        return cls(p1, 1.0 - p1)

    @classmethod
    def from_probs(cls, probs) -> "TopTwoProbs":
        top = np.sort(np.asarray(probs, dtype=float))[::-1]
        if top.size < 2:
            raise DomainError("need at least two classes")
        return cls(float(top[0]), float(top[1]))

    @property
    def rest(self) -> float:
        return max(0.0, 1.0 - self.p1 - self.p2)


@dataclass(frozen=True)
class Divergence:
    """One of the six supported divergences; ``alpha`` is set only for Rényi."""

    name: str
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.name not in _NAMES:
            raise DomainError(f"unknown divergence {self.name!r}")
        if self.name == "renyi":
            if self.alpha is None or not self.alpha > 1:
                raise DomainError(f"Renyi divergence requires alpha > 1, got {self.alpha}")
        elif self.alpha is not None:
            raise DomainError(f"{self.name} takes no alpha")

    def __str__(self):
        return f"renyi({self.alpha:g})" if self.name == "renyi" else self.name

    @classmethod
    def parse(cls, text: str, alpha: Optional[float] = None) -> "Divergence":
        key = text.strip().lower().replace("-", "").replace("_", "")
        key = _ALIASES.get(key, key)
        if key == "renyi":
            return cls("renyi", alpha)
        return cls(key)


_NAMES = ("kl", "renyi", "hellinger2", "chi2", "bhattacharyya", "tv")
_ALIASES = {
    "hellinger": "hellinger2",
    "h2": "hellinger2",
    "chisquared": "chi2",
    "bhat": "bhattacharyya",
    "b": "bhattacharyya",
    "totalvariation": "tv",
}

KL = Divergence("kl")
HELLINGER2 = Divergence("hellinger2")
CHI2 = Divergence("chi2")
BHATTACHARYYA = Divergence("bhattacharyya")
TV = Divergence("tv")


def renyi(alpha: float) -> Divergence:
    return Divergence("renyi", alpha)


def _log_power_mean(p1: float, p2: float, alpha: float) -> float:
    """log of ((p1^(1-a) + p2^(1-a)) / 2)^(1/(1-a)), stable for large alpha."""
    e = 1.0 - alpha
    with np.errstate(divide="ignore"):
        logs = np.array([e * np.log(p1), e * np.log(p2)])
    return float((special.logsumexp(logs) - math.log(2.0)) / e)


def lower_bound(kind: Divergence, tt: TopTwoProbs) -> float:
    """min d(Q, P) over Q whose argmax differs from P's, as a function of (p1, p2)."""
    p1, p2 = tt.p1, tt.p2
    if p1 == p2:
        return 0.0
    name = kind.name
    if name == "kl":
        return max(0.0, -math.log(2.0 * math.sqrt(p1 * p2) + tt.rest))
    if name == "renyi":
        eta = math.exp(_log_power_mean(p1, p2, kind.alpha))
        return max(0.0, -math.log(tt.rest + 2.0 * eta))
    if name == "hellinger2":
        return 1.0 - math.sqrt(1.0 - (math.sqrt(p1) - math.sqrt(p2)) ** 2 / 2.0)
    if name == "chi2":
        return (p1 - p2) ** 2 / ((p1 + p2) - (p1 - p2) ** 2)
    if name == "bhattacharyya":
        eta = 2.0 * math.sqrt(p1 * p2) - p1 - p2 + 2.0
        return max(0.0, -0.5 * math.log(eta / 2.0))
    return abs(p1 - p2) / 2.0


def bhattacharyya_table_form(tt: TopTwoProbs) -> float:
    """The Bhattacharyya bound written as a ratio, as tabulated alongside the radii."""
    p1, p2 = tt.p1, tt.p2
    num = (math.sqrt(p1) + math.sqrt(p2)) ** 2 + 2.0 * (1.0 - p1 - p2)
    den = math.sqrt(2.0 * (2.0 * math.sqrt(p1 * p2) + 2.0 - p1 - p2))
    return -math.log(num / den)


def divergence(kind: Divergence, q, p) -> np.ndarray | float:
    """d(Q, P) for one distribution ``q`` or a stack of them (last axis = classes).

    Uses 0 log(0/q) = 0 and p log(p/0) = inf.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    name = kind.name
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if name == "kl":
            out = special.rel_entr(q, p).sum(axis=-1)
        elif name == "renyi":
            a = kind.alpha
            terms = np.where(q > 0, q**a * p ** (1.0 - a), 0.0)
            terms = np.where((q > 0) & (p == 0), np.inf, terms)
            out = np.log(terms.sum(axis=-1)) / (a - 1.0)
        elif name == "hellinger2":
            out = 0.5 * ((np.sqrt(q) - np.sqrt(p)) ** 2).sum(axis=-1)
        elif name == "chi2":
            terms = np.where(p > 0, (q - p) ** 2 / np.where(p > 0, p, 1.0), np.where(q > 0, np.inf, 0.0))
            out = terms.sum(axis=-1)
        elif name == "bhattacharyya":
            out = -np.log(np.sqrt(q * p).sum(axis=-1))
        else:
            out = 0.5 * np.abs(q - p).sum(axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _check_multinomial(probs) -> np.ndarray:
    P = np.asarray(probs, dtype=float)
    if P.ndim != 1 or P.size < 2:
        raise DomainError("a multinomial needs at least two classes")
    if np.any(P < 0) or not np.all(np.isfinite(P)):
        raise DomainError("multinomial entries must be finite and non-negative")
    if abs(P.sum() - 1.0) > 1e-12 * P.size:
        raise DomainError(f"multinomial entries must sum to 1, got {P.sum()!r}")
    return P


def minimizing_distribution(kind: Divergence, probs) -> np.ndarray:
    """The Q attaining :func:`lower_bound`, returned in the index order of ``probs``.

    The two largest classes of P share the tied value ``q0``; the remaining
    classes are rescaled copies of P.
    """
    P = _check_multinomial(probs)
    order = np.argsort(-P, kind="stable")
    s = P[order]
    p1, p2, tail = s[0], s[1], s[2:]
    rest = max(0.0, 1.0 - p1 - p2)
    name = kind.name
    if name == "kl":
        eta = 2.0 * math.sqrt(p1 * p2) + rest
        q0, qt = math.sqrt(p1 * p2) / eta, tail / eta
    elif name == "renyi":
        eta = math.exp(_log_power_mean(p1, p2, kind.alpha)) if p2 > 0 else 0.0
        z = 2.0 * eta + rest
        q0, qt = eta / z, tail / z
    elif name in ("hellinger2", "bhattacharyya"):
        eta = 2.0 - (math.sqrt(p1) - math.sqrt(p2)) ** 2
        q0, qt = (math.sqrt(p1) + math.sqrt(p2)) ** 2 / (2.0 * eta), 2.0 * tail / eta
    elif name == "chi2":
        eta = (p1 + p2) - (p1 - p2) ** 2
        q0, qt = 2.0 * p1 * p2 / eta, (p1 + p2) * tail / eta
    else:
        q0, qt = (p1 + p2) / 2.0, tail.copy()
    sorted_q = np.concatenate(([q0, q0], qt))
    Q = np.empty_like(sorted_q)
    Q[order] = sorted_q
    return Q


def _simplex_chunks(k: int, n: int):
    """Yield arrays of simplex grid points (rows sum to 1, coordinates j/n)."""
    step = 1.0 / n
    if k == 2:
        i = np.arange(n + 1)
        yield np.stack([i * step, (n - i) * step], axis=1)
    elif k == 3:
        for i in range(n + 1):
            j = np.arange(n - i + 1)
            yield np.stack([np.full(j.shape, i * step), j * step, (n - i - j) * step], axis=1)
    else:
        for i in range(n + 1):
            m = n - i
            j, l = np.meshgrid(np.arange(m + 1), np.arange(m + 1), indexing="ij")
            keep = j + l <= m
            j, l = j[keep], l[keep]
            yield np.stack([np.full(j.shape, i * step), j * step, l * step, (m - j - l) * step], axis=1)


def brute_force_lower_bound(kind: Divergence, probs, grid_resolution: float = 1e-3) -> float:
    """Grid-search oracle for :func:`lower_bound` on small simplices (k <= 4).

    Minimizes ``d(Q, P)`` over simplex grid points whose largest entry is not
    uniquely at the argmax of P (ties count as disagreement).
    """
    P = _check_multinomial(probs)
    k = P.size
    if k > 4:
        raise SizeError(f"brute force oracle supports k <= 4 classes, got {k}")
    if not 1e-4 <= grid_resolution <= 1e-2:
        raise DomainError(f"grid_resolution must lie in [1e-4, 1e-2], got {grid_resolution}")
    n = int(round(1.0 / grid_resolution))
    top = int(np.argmax(P))
    others = [j for j in range(k) if j != top]
    best = math.inf
    for Q in _simplex_chunks(k, n):
        Q = Q[Q[:, top] <= Q[:, others].max(axis=1)]
        if Q.size:
            best = min(best, float(np.min(divergence(kind, Q, P))))
    return best
