"""Oracle report: every closed form checked against an independent computation.

Each check yields PASS, FAIL or WARN.  WARN marks a known discrepancy between
a printed formula and its verified replacement; it never fails the report.
``corrupt`` names a quantity to perturb by 1%, for fault-injection testing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import divergences as dv
from . import l2, lp
from .divergences import TopTwoProbs
from .smoothing import GenGaussian, ShiftPair, gn_kl_closed, gn_kl_numeric

PASS, FAIL, WARN = "PASS", "FAIL", "WARN"
CORRUPTIBLE = ("kl-bound", "gn-kl", "chi2-radius", "coefficient")

ALL_KINDS = (dv.KL, dv.renyi(2.0), dv.HELLINGER2, dv.CHI2, dv.BHATTACHARYYA, dv.TV)
P1_GRID = tuple(np.round(np.arange(0.55, 0.951, 0.05), 2))


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    status: str
    detail: str

    def line(self) -> str:
        return f"{self.status:4s}  {self.suite:<22s} {self.name:<34s} {self.detail}"


def _factor(corrupt: Optional[str], name: str) -> float:
    return 1.01 if corrupt == name else 1.0


def grid_distributions(p1_grid=P1_GRID) -> list[np.ndarray]:
    """Binary and three-class P with the given top probabilities."""
    out = []
    for p1 in p1_grid:
        rest = 1.0 - p1
        out.append(np.array([p1, rest]))
        out.append(np.array([p1, 0.7 * rest, 0.3 * rest]))
    return out


def check_divergence_oracle(resolution=1e-3, corrupt=None, p1_grid=P1_GRID) -> Iterable[Check]:
    for kind in ALL_KINDS:
        worst = 0.0
        for P in grid_distributions(p1_grid):
            lb = dv.lower_bound(kind, TopTwoProbs.from_probs(P))
            if kind.name == "kl":
                lb *= _factor(corrupt, "kl-bound")
            bf = dv.brute_force_lower_bound(kind, P, resolution)
            worst = max(worst, abs(bf - lb))
        ok = worst <= 2 * resolution
        yield Check("divergence-bounds", f"brute force vs {kind}", PASS if ok else FAIL, f"max |diff| = {worst:.3g}")


def check_minimizers(corrupt=None, p1_grid=P1_GRID) -> Iterable[Check]:
    for kind in ALL_KINDS:
        worst = 0.0
        for P in grid_distributions(p1_grid):
            lb = dv.lower_bound(kind, TopTwoProbs.from_probs(P))
            if kind.name == "kl":
                lb *= _factor(corrupt, "kl-bound")
            Q = dv.minimizing_distribution(kind, P)
            worst = max(worst, abs(dv.divergence(kind, Q, P) - lb))
        yield Check("divergence-bounds", f"minimizer of {kind}", PASS if worst <= 1e-10 else FAIL, f"max |diff| = {worst:.3g}")


def check_bhattacharyya_forms() -> Iterable[Check]:
    worst = 0.0
    for P in grid_distributions():
        tt = TopTwoProbs.from_probs(P)
        worst = max(worst, abs(dv.bhattacharyya_table_form(tt) - dv.lower_bound(dv.BHATTACHARYYA, tt)))
    yield Check("divergence-bounds", "bhattacharyya two printed forms", PASS if worst <= 1e-12 else FAIL, f"max |diff| = {worst:.3g}")


def check_gn_kl(corrupt=None) -> Iterable[Check]:
    ratios = (0.1, 0.5, 1.0, 2.0, 3.0)
    for s in (2, 4):
        g = GenGaussian(1.0, s)
        worst = max(
            abs(gn_kl_closed(g, ShiftPair.of([r])) * _factor(corrupt, "gn-kl") / gn_kl_numeric(g, r) - 1.0)
            for r in ratios
        )
        yield Check("gn-kl", f"closed == quadrature, s={s}", PASS if worst <= 1e-8 else FAIL, f"max rel diff = {worst:.3g}")
    for s in (1, 3, 5):
        g = GenGaussian(1.0, s)
        gaps = [gn_kl_closed(g, ShiftPair.of([r])) - gn_kl_numeric(g, r) for r in ratios]
        ok = min(gaps) >= 0
        yield Check("gn-kl", f"closed >= quadrature, s={s}", PASS if ok else FAIL, f"min gap = {min(gaps):.3g}")
    g = GenGaussian(1.0, 1)
    closed, quad = gn_kl_closed(g, ShiftPair.of([1.0])), gn_kl_numeric(g, 1.0)
    ok = abs(quad - math.exp(-1)) < 1e-10
    yield Check("gn-kl", "laplace KL at delta = sigma", PASS if ok else FAIL, f"quadrature {quad:.10f} vs 1/e")
    yield Check("gn-kl", "odd-shape closed form is conservative", WARN, f"s=1, delta=sigma: closed {closed:.4f} vs true {quad:.4f}")


def check_radii(corrupt=None) -> Iterable[Check]:
    pairs = [(0.9, 0.1), (0.6, 0.3), (0.99, 0.01), (0.51, 0.49), (0.7, 0.2), (0.55, 0.25)]
    for kind in (dv.KL, dv.renyi(2.0), dv.HELLINGER2, dv.CHI2, dv.BHATTACHARYYA, dv.TV):
        worst = 0.0
        for sigma in (0.25, 1.0, 2.0):
            for p in pairs:
                tt = TopTwoProbs(*p)
                gen = l2.radius_generic(kind, tt, l2.closed_form_std(kind, sigma))
                closed = l2.radius_closed(kind, tt, sigma)
                if kind.name == "chi2":
                    closed *= _factor(corrupt, "chi2-radius")
                worst = max(worst, abs(gen - closed) / max(closed, 1e-300))
        yield Check("l2-radii", f"closed form vs inversion, {kind}", PASS if worst <= 1e-9 else FAIL, f"max rel diff = {worst:.3g}")
    tt = TopTwoProbs.binary(0.99)
    printed, tight = l2.tv_radius_as_printed(tt, 1.0), l2.radius_cohen(tt, 1.0)
    yield Check(
        "l2-radii", "TV row as printed", WARN,
        f"2sigma*Phi^-1(|p1-p2|/2+1/2) = {printed:.4f} exceeds tight radius {tight:.4f} at p1=0.99; using |p1-p2|/4",
    )
    tt = TopTwoProbs(0.9, 0.1)
    yield Check(
        "l2-radii", "Li l1 radius sign", WARN,
        f"sigma*log(1-p1+p2) = {l2.li_l1_as_printed(tt, 1.0):.4f} < 0; using -sigma*log(1-p1+p2)",
    )


def check_hierarchy() -> Iterable[Check]:
    grid = np.round(np.arange(0.51, 0.995, 0.01), 2)
    rows = l2.hierarchy_report(grid, 1.0)
    for v in l2.VERDICTS:
        failing = [r.p1 for r in rows if not r.verdicts[v]]
        yield Check("orderings", v, PASS if not failing else FAIL, f"fails at {failing}" if failing else "holds on 0.51..0.99")
    row = l2.hierarchy_row(0.999, 1.0)
    ok = not row.verdicts["hellinger2>kl"]
    cross = l2.hellinger_kl_crossover()
    yield Check("orderings", "hellinger2>kl fails at p1=0.999", PASS if ok else FAIL, f"crossover at p1 = {cross:.5f}")
    cohen_ok = all(
        r.radii["cohen"] >= max(v for k, v in r.radii.items() if k != "cohen") for r in rows
    )
    yield Check("orderings", "cohen dominates", PASS if cohen_ok else FAIL, "binary grid 0.51..0.99")


def check_lp(corrupt=None) -> Iterable[Check]:
    shrink = 1.0 / _factor(corrupt, "coefficient")
    bad = [
        (p, k, c)
        for p in range(1, 65)
        for k in lp.active_orders(p)
        if (c := lp.kl_coefficient(p, k) * shrink) < 1.0
    ]
    yield Check("lp", "active coefficients >= 1, p <= 64", PASS if not bad else FAIL, f"violations: {bad[:3]}" if bad else "none")
    tt = TopTwoProbs(0.99, 0.01)
    eq = lp.radius_equal_eps(3, tt, 1.0)
    front = lp.tradeoff_frontier(3, tt, 1.0, 3072, 50)
    ok = abs(eq - 0.86) <= 0.01 and abs(front[0].eps_low - 1.44) <= 0.01
    yield Check("lp", "l3/l1 trade-off endpoints", PASS if ok else FAIL, f"equal point {eq:.4f}, l1 endpoint {front[0].eps_low:.4f}")
    ratio = lp.linf_volume_ratio(9 * 150528, 150528)
    yield Check("lp", "l_p vs l_inf volume ratio", PASS if 0.985 <= ratio <= 0.995 else FAIL, f"d=150528, p=9d: {ratio:.6f}")


def run_all(corrupt: Optional[str] = None, quick: bool = False) -> list[Check]:
    resolution = 1e-2 if quick else 1e-3
    checks: list[Check] = []
    checks += check_divergence_oracle(resolution, corrupt)
    checks += check_minimizers(corrupt)
    checks += check_bhattacharyya_forms()
    checks += check_gn_kl(corrupt)
    checks += check_radii(corrupt)
    checks += check_hierarchy()
    checks += check_lp(corrupt)
    return checks


def report(checks: Iterable[Check]) -> tuple[str, bool]:
    checks = list(checks)
    lines = [c.line() for c in checks]
    ok = all(c.status != FAIL for c in checks)
    counts = {s: sum(c.status == s for c in checks) for s in (PASS, WARN, FAIL)}
    lines.append(f"{counts[PASS]} passed, {counts[WARN]} warnings, {counts[FAIL]} failed")
    return "\n".join(lines), ok
