"""Command-line entry point: ``smoothcert <command> [flags]``.

Exit codes: 0 success, 1 domain or verification failure, 2 usage error.
Numbers are printed with 12 significant digits.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import sys
from typing import Optional, Sequence

import numpy as np

from . import l2, lp, verify
from .divergences import TopTwoProbs
from .errors import SmoothCertError
from .pipeline import (
    SmoothingConfig,
    accuracy_curve,
    certify_dataset,
    check_norms,
    fmt,
    write_certificates_csv,
)
from .smoothing import GenGaussian, gn_abs_moment, gn_noise, rng_stream
from .toy import ToyModel, eot_pgd_l2, make_blobs, train_noise_augmented

CURVE_HEADER = ("p1", "kl", "hellinger", "chi2", "bhattacharyya", "tv", "renyi_sup", "lecuyer", "cohen")
_CURVE_KEYS = ("kl", "hellinger2", "chi2", "bhattacharyya", "tv", "renyi_sup", "lecuyer", "cohen")


class CommandError(Exception):
    """Domain or I/O failure inside a command; maps to exit code 1."""


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as e:
        raise CommandError(f"cannot write {path}: {e.strerror}") from e
    with fh:
        yield fh


def _write_rows(path, header, rows):
    with _output(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["" if v is None else fmt(v) if isinstance(v, float) else v for v in r])


def _norms(text: Optional[str]) -> list[int]:
    if not text:
        return []
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise CommandError(f"--norms must be comma-separated integers, got {text!r}") from e


def cmd_radius(args) -> int:
    tt = TopTwoProbs(args.p1, args.p2)
    cert = l2.certify_l2(args.divergence, tt, args.sigma, args.alpha)
    print(fmt(cert.radius))
    return 0


def cmd_curve(args) -> int:
    if not 0.5 < args.p1_min <= args.p1_max < 1.0:
        raise CommandError("need 0.5 < p1-min <= p1-max < 1")
    if args.steps < 1:
        raise CommandError("--steps must be >= 1")
    grid = np.linspace(args.p1_min, args.p1_max, args.steps)
    rows = []
    for row in l2.hierarchy_report(grid, args.sigma):
        rows.append([float(row.p1)] + [float(row.radii[k]) for k in _CURVE_KEYS])
    _write_rows(args.out, CURVE_HEADER, rows)
    return 0


def cmd_lp_radius(args) -> int:
    tt = TopTwoProbs(args.p1, args.p2)
    if args.method == "equal":
        r = lp.radius_equal_eps(args.p, tt, args.sigma)
    else:
        if args.d is None:
            raise CommandError("--method naive needs --d")
        r = lp.radius_lp_naive(args.p, tt, args.sigma, args.d)
    print(fmt(r))
    return 0


def cmd_tradeoff(args) -> int:
    tt = TopTwoProbs.binary(args.p1) if args.p2 is None else TopTwoProbs(args.p1, args.p2)
    front = lp.tradeoff_frontier(args.p, tt, args.sigma, args.d, args.points)
    _write_rows(args.out, ("eps_high", "eps_low"), [(pt.eps_high, pt.eps_low) for pt in front])
    return 0


def _config(args) -> SmoothingConfig:
    return SmoothingConfig(
        sigma=args.sigma,
        shape=args.shape,
        n0=args.n0,
        n1=args.n1,
        gamma0=args.gamma0,
        gamma1=args.gamma1,
        seed=args.seed,
    )


def _trained_model(args, cfg: SmoothingConfig):
    """Noise-augmented toy model plus a held-out test set, both fixed by --seed."""
    if args.dataset != "blobs":
        raise CommandError(f"unknown dataset {args.dataset!r}")
    per_class = max(1, args.n // args.classes)
    train = make_blobs(args.d, args.classes, per_class, args.separation, seed=args.seed)
    test = make_blobs(args.d, args.classes, per_class, args.separation, seed=args.seed + 1)
    model = ToyModel.init(args.d, args.classes, args.hidden, seed=args.seed)
    model = train_noise_augmented(model, train, cfg.noise, args.epochs, args.step_size, seed=args.seed)
    return model, test


def cmd_certify(args) -> int:
    cfg = _config(args)
    norms = _norms(args.norms) or [int(cfg.shape)]
    check_norms(cfg.shape, norms)
    model, test = _trained_model(args, cfg)
    certs = certify_dataset(model, test, cfg, norms)
    with _output(args.out) as fh:
        write_certificates_csv(certs, fh)
    summary = sys.stderr if args.out in (None, "-") else sys.stdout
    for p in norms:
        top = max((c.radius(p) for c in certs), default=0.0)
        grid = np.linspace(0.0, top, args.grid_steps + 1) if top > 0 else [0.0]
        print(f"# l{p} certified accuracy", file=summary)
        print("radius,certified_accuracy", file=summary)
        for r, acc in accuracy_curve(certs, p, grid):
            print(f"{fmt(r)},{fmt(acc)}", file=summary)
    return 0


def cmd_attack(args) -> int:
    cfg = _config(args)
    if int(cfg.shape) != 2:
        raise CommandError("the l2 attack needs --shape 2")
    model, test = _trained_model(args, cfg)
    test = test.subset(np.arange(min(args.attack_inputs, len(test))))
    certs = certify_dataset(model, test, cfg, [2])
    rows, violations = [], 0
    for c in certs:
        if c.abstained or not c.correct():
            continue
        res = eot_pgd_l2(
            model, test.X[c.input_id], int(test.y[c.input_id]), cfg.noise,
            n_mc=args.n_mc, steps=args.steps, step_size=args.attack_step, seed=args.seed + c.input_id,
        )
        r = c.radius(2)
        if res.success and res.norm < r:
            violations += 1
        ratio = res.norm / r if res.success and r > 0 else None
        rows.append((c.input_id, r, res.norm if res.success else None, int(res.success), ratio))
    _write_rows(args.out, ("input_id", "radius", "attack_norm", "success", "ratio"), rows)
    print(f"violations,{violations}", file=sys.stderr)
    return 1 if violations else 0


def cmd_sample_stats(args) -> int:
    g = GenGaussian(args.sigma, args.shape)
    x = gn_noise(g, args.n, rng_stream(args.seed, 0x5A))
    rows = []
    for k in range(1, args.max_moment + 1):
        emp = float(np.mean(np.abs(x) ** k))
        exact = gn_abs_moment(g, k)
        rows.append((k, emp, exact, emp / exact - 1.0))
    _write_rows(args.out, ("k", "empirical", "exact", "rel_error"), rows)
    return 0


def cmd_verify(args) -> int:
    text, ok = verify.report(verify.run_all(corrupt=args.corrupt, quick=args.quick))
    print(text)
    return 0 if ok else 1


def _add_mc_flags(sp):
    sp.add_argument("--dataset", default="blobs", choices=["blobs"])
    sp.add_argument("--d", type=int, default=16)
    sp.add_argument("--classes", type=int, default=2)
    sp.add_argument("--n", type=int, default=400, help="test inputs (split evenly over classes)")
    sp.add_argument("--separation", type=float, default=8.0)
    sp.add_argument("--hidden", type=int, default=None, help="hidden width; omit for a linear model")
    sp.add_argument("--epochs", type=int, default=200)
    sp.add_argument("--step-size", type=float, default=0.5)
    sp.add_argument("--sigma", type=float, default=0.25)
    sp.add_argument("--shape", type=int, default=2)
    sp.add_argument("--n0", type=int, default=100)
    sp.add_argument("--n1", type=int, default=100_000)
    sp.add_argument("--gamma0", type=float, default=0.001)
    sp.add_argument("--gamma1", type=float, default=0.001)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="smoothcert", description="Certified radii for randomized smoothing.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("radius", help="l2 radius for one divergence or baseline")
    sp.add_argument("--divergence", required=True,
                    help="kl, renyi, hellinger, chi2, bhattacharyya, tv, renyi_sup, cohen, lecuyer_l2, lecuyer_l1, li_l1")
    sp.add_argument("--p1", type=float, required=True)
    sp.add_argument("--p2", type=float, required=True)
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=None, help="Renyi order")
    sp.set_defaults(func=cmd_radius)

    sp = sub.add_parser("curve", help="l2 radius of every method over a p1 grid (binary case)")
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--p1-min", type=float, default=0.51)
    sp.add_argument("--p1-max", type=float, default=0.99)
    sp.add_argument("--steps", type=int, default=49)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("lp-radius", help="l_p radius under GN smoothing of shape p")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--p1", type=float, required=True)
    sp.add_argument("--p2", type=float, required=True)
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--d", type=int, default=None)
    sp.add_argument("--method", choices=["equal", "naive"], default="equal")
    sp.set_defaults(func=cmd_lp_radius)

    sp = sub.add_parser("tradeoff", help="l_p vs companion-norm radius frontier")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--p1", type=float, required=True)
    sp.add_argument("--p2", type=float, default=None, help="defaults to 1 - p1")
    sp.add_argument("--points", type=int, default=50)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_tradeoff)

    sp = sub.add_parser("certify", help="train a toy model and certify a held-out blob set")
    _add_mc_flags(sp)
    sp.add_argument("--norms", default=None, help="comma-separated norm orders (default: the shape)")
    sp.add_argument("--grid-steps", type=int, default=10)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("attack", help="EOT-PGD against certified inputs; exit 1 on any soundness violation")
    _add_mc_flags(sp)
    sp.add_argument("--attack-inputs", type=int, default=100)
    sp.add_argument("--n-mc", type=int, default=1000)
    sp.add_argument("--steps", type=int, default=50)
    sp.add_argument("--attack-step", type=float, default=0.1)
    sp.set_defaults(func=cmd_attack)

    sp = sub.add_parser("sample-stats", help="empirical vs exact absolute moments of GN noise")
    sp.add_argument("--sigma", type=float, default=1.0)
    sp.add_argument("--shape", type=float, default=2.0)
    sp.add_argument("--n", type=int, default=1_000_000)
    sp.add_argument("--max-moment", type=int, default=2)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=cmd_sample_stats)

    sp = sub.add_parser("verify", help="run every oracle check")
    sp.add_argument("--corrupt", choices=verify.CORRUPTIBLE, default=None,
                    help="perturb one quantity by 1%% to check that the report fails")
    sp.add_argument("--quick", action="store_true", help="coarser brute-force grid")
    sp.set_defaults(func=cmd_verify)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CommandError, SmoothCertError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
