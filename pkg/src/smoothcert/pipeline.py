"""Monte-Carlo certification: identify the top class, lower-bound its probability, emit radii.

Noise for input ``i`` is drawn in fixed-size chunks, chunk ``c`` of phase
``ph`` coming from ``rng_stream(seed, i, ph, c)``.  Certificates therefore
depend only on (seed, input id, config), never on how inputs are scheduled
across threads.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .divergences import TopTwoProbs
from .errors import ConfigurationError, DomainError
from .lp import companion_order, radius_equal_eps, tradeoff_frontier
from .numerics import binomial_upper_tail, clopper_pearson_lower
from .smoothing import GenGaussian, gn_noise, rng_stream
from .toy import Dataset

ABSTAIN = -1
CSV_HEADER = ("input_id", "label", "predicted", "abstained", "p1_lo", "p2_hi", "norm", "radius")
THREADS_ENV = "SMOOTHCERT_THREADS"

BaseClassifier = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SmoothingConfig:
    sigma: float = 0.25
    shape: float = 2
    n0: int = 100
    n1: int = 100_000
    gamma0: float = 0.001
    gamma1: float = 0.001
    seed: int = 0
    chunk: int = 1000

    def __post_init__(self):
        if self.n0 < 1 or self.n1 < 1 or self.chunk < 1:
            raise DomainError("n0, n1 and chunk must be >= 1")
        if not (0 < self.gamma0 < 1 and 0 < self.gamma1 < 1):
            raise DomainError("gamma0 and gamma1 must lie in (0, 1)")
        GenGaussian(self.sigma, self.shape)

    @property
    def noise(self) -> GenGaussian:
        return GenGaussian(self.sigma, self.shape)

    @property
    def error_bound(self) -> float:
        return self.gamma0 + self.gamma1


@dataclass
class Certificate:
    input_id: int
    predicted: int
    p1_lo: float
    p2_hi: float
    radii: dict = field(default_factory=dict)
    abstained: bool = False
    label: Optional[int] = None
    config: Optional[SmoothingConfig] = None

    def radius(self, p: int) -> float:
        return 0.0 if self.abstained else self.radii.get(p, 0.0)

    def correct(self) -> bool:
        return not self.abstained and self.label is not None and self.predicted == self.label


def sample_counts(f: BaseClassifier, x, cfg: SmoothingConfig, n: int, input_id: int, phase: int) -> np.ndarray:
    """Class counts of f(x + noise) over ``n`` draws."""
    x = np.asarray(x, dtype=float)
    counts = np.zeros(0, dtype=np.int64)
    noise = cfg.noise
    done, c = 0, 0
    while done < n:
        m = min(cfg.chunk, n - done)
        rng = rng_stream(cfg.seed, input_id, phase, c)
        preds = np.asarray(f(x[None, :] + gn_noise(noise, (m, x.size), rng)), dtype=np.int64)
        batch = np.bincount(preds)
        if batch.size > counts.size:
            counts = np.pad(counts, (0, batch.size - counts.size))
        counts[: batch.size] += batch
        done += m
        c += 1
    return counts


def predict_class(f: BaseClassifier, x, cfg: SmoothingConfig, input_id: int = 0) -> tuple[int, bool]:
    """Modal label over n0 noisy evaluations and whether it is significant.

    Confident iff the one-sided binomial test of the top count against the
    runner-up count rejects "top probability <= 1/2" at level gamma0.
    """
    counts = sample_counts(f, x, cfg, cfg.n0, input_id, phase=0)
    order = np.argsort(-counts, kind="stable")
    n_a = int(counts[order[0]])
    n_b = int(counts[order[1]]) if counts.size > 1 else 0
    p_value = binomial_upper_tail(n_a, n_a + n_b, 0.5)
    return int(order[0]), p_value <= cfg.gamma0


def estimate_p1_lower(f: BaseClassifier, x, label: int, cfg: SmoothingConfig, input_id: int = 0) -> tuple[float, float]:
    """Clopper-Pearson lower bound on P[f(x + noise) = label] from n1 fresh draws."""
    counts = sample_counts(f, x, cfg, cfg.n1, input_id, phase=1)
    hits = int(counts[label]) if label < counts.size else 0
    p1_lo = clopper_pearson_lower(hits, cfg.n1, cfg.gamma1)
    return p1_lo, 1.0 - p1_lo


def check_norms(shape, norms: Sequence[int]) -> list[int]:
    """Validate that every requested norm is certifiable under GN(., ., shape) noise."""
    if not norms:
        raise ConfigurationError("at least one norm is required")
    if float(shape) != int(shape):
        raise ConfigurationError(f"certification needs an integer shape, got {shape}")
    s = int(shape)
    out = []
    for p in norms:
        if int(p) != p or not 1 <= p <= s or (s - p) % 2:
            valid = ", ".join(f"l{k}" for k in range(s, 0, -2))
            raise ConfigurationError(f"norm l{p} cannot be certified with shape {s}; valid norms: {valid}")
        out.append(int(p))
    return out


def radii_for(tt: TopTwoProbs, shape: int, sigma: float, norms: Sequence[int], dim: int) -> dict:
    """Radius for each requested norm from one (p1_lo, p2_hi) pair.

    l_shape gets the equal-eps radius.  For shapes 3 and 4 the companion norm
    (l1, l2) gets the largest radius on the trade-off frontier; any other
    lower norm gets the equal-eps radius, which certifies it simultaneously.
    Each entry is individually valid; entries from the frontier are not
    jointly attainable with the l_shape entry.
    """
    out = {}
    for p in norms:
        if p == shape:
            out[p] = radius_equal_eps(shape, tt, sigma)
        elif shape in (3, 4) and p == companion_order(shape):
            out[p] = tradeoff_frontier(shape, tt, sigma, dim, n_points=2)[0].eps_low
        else:
            out[p] = radius_equal_eps(shape, tt, sigma)
    return out


def certify(
    f: BaseClassifier,
    x,
    cfg: SmoothingConfig,
    norms: Sequence[int] = (),
    input_id: int = 0,
    label: Optional[int] = None,
) -> Certificate:
    norms = check_norms(cfg.shape, list(norms) or [int(cfg.shape)])
    x = np.asarray(x, dtype=float)
    predicted, confident = predict_class(f, x, cfg, input_id)
    if not confident:
        return Certificate(input_id, ABSTAIN, 0.0, 1.0, {}, True, label, cfg)
    p1_lo, p2_hi = estimate_p1_lower(f, x, predicted, cfg, input_id)
    if p1_lo <= 0.5:
        return Certificate(input_id, ABSTAIN, p1_lo, p2_hi, {}, True, label, cfg)
    tt = TopTwoProbs(p1_lo, p2_hi)
    radii = radii_for(tt, int(cfg.shape), cfg.sigma, norms, x.size)
    return Certificate(input_id, predicted, p1_lo, p2_hi, radii, False, label, cfg)


def thread_count(threads: Optional[int] = None) -> int:
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def certify_dataset(
    f: BaseClassifier,
    data: Dataset,
    cfg: SmoothingConfig,
    norms: Sequence[int] = (),
    threads: Optional[int] = None,
) -> list[Certificate]:
    """Certify every row of ``data``; output order follows input order."""
    norms = check_norms(cfg.shape, list(norms) or [int(cfg.shape)])

    def one(i):
        return certify(f, data.X[i], cfg, norms, input_id=i, label=int(data.y[i]))

    n_threads = thread_count(threads)
    if n_threads == 1:
        return [one(i) for i in range(len(data))]
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        return list(pool.map(one, range(len(data))))


def accuracy_curve(certs: Sequence[Certificate], p: int, radius_grid) -> list[tuple[float, float]]:
    """Fraction of inputs that are correctly classified with radius >= r, for each r."""
    n = len(certs)
    out = []
    for r in radius_grid:
        hits = sum(1 for c in certs if c.correct() and c.radius(p) >= r)
        out.append((float(r), hits / n if n else 0.0))
    return out


def certified_accuracy_curve(
    f: BaseClassifier,
    data: Dataset,
    cfg: SmoothingConfig,
    p: int,
    radius_grid,
    threads: Optional[int] = None,
) -> list[tuple[float, float]]:
    certs = certify_dataset(f, data, cfg, [p], threads)
    return accuracy_curve(certs, p, radius_grid)


def fmt(x: float) -> str:
    return format(float(x), ".12g")


def write_certificates_csv(certs: Sequence[Certificate], out) -> None:
    """One row per (input, norm); abstentions keep the norm but leave radius empty."""
    own = isinstance(out, (str, os.PathLike))
    fh = open(out, "w", newline="") if own else out
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for c in certs:
            norms = sorted(c.radii) or ([int(c.config.shape)] if c.config else [""])
            for p in norms:
                w.writerow([
                    c.input_id,
                    "" if c.label is None else c.label,
                    c.predicted,
                    int(c.abstained),
                    fmt(c.p1_lo),
                    fmt(c.p2_hi),
                    p,
                    "" if c.abstained else fmt(c.radii[p]),
                ])
    finally:
        if own:
            fh.close()


def read_certificates_csv(src) -> list[Certificate]:
    text = open(src).read() if isinstance(src, (str, os.PathLike)) else src.read()
    rows = list(csv.DictReader(io.StringIO(text)))
    by_id: dict = {}
    for r in rows:
        i = int(r["input_id"])
        if i not in by_id:
            by_id[i] = Certificate(
                input_id=i,
                predicted=int(r["predicted"]),
                p1_lo=float(r["p1_lo"]),
                p2_hi=float(r["p2_hi"]),
                abstained=bool(int(r["abstained"])),
                label=int(r["label"]) if r["label"] else None,
            )
        if r["radius"]:
            by_id[i].radii[int(r["norm"])] = float(r["radius"])
    return list(by_id.values())


def certificates_to_json(certs: Sequence[Certificate]) -> str:
    objs = []
    for c in certs:
        objs.append({
            "input_id": c.input_id,
            "label": c.label,
            "predicted": c.predicted,
            "abstained": c.abstained,
            "p1_lo": c.p1_lo,
            "p2_hi": c.p2_hi,
            "radii": {str(p): r for p, r in sorted(c.radii.items())},
            "config": asdict(c.config) if c.config else None,
        })
    return json.dumps(objs, indent=1, sort_keys=True)
