"""Command line interface: ``kptau {build,tau,expand,verify,grid} CONFIG``.

Exit codes: 0 pass, 1 property failure, 2 input error, 3 degenerate model.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import linalg as la
from .config import FamilyConfig, build_model
from .errors import (
    BackendUnsupported,
    ConfigError,
    DegenerateK,
    DegenerateVandermonde,
    KPTauError,
    SingularAtOrigin,
    ZeroTau,
)
from .linalg import EXACT, FLOAT
from .plotting import figure_path, plot_coefficients, plot_field
from .rankone import lemma_identities, verify_rank_one
from .report import lemma_pair, run_battery
from .schur import schur_expansion
from .tau import max_pairwise_rel, tau_general, tau_W_BCD

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DEGENERATE = 0, 1, 2, 3
DEGENERATE = (SingularAtOrigin, DegenerateK, DegenerateVandermonde, ZeroTau)


def format_scalar(x) -> str:
    """Full-precision text: Fractions as ``p/q``, floats by shortest round-trip repr."""
    if isinstance(x, (Fraction, la.GaussianFraction, int)):
        return str(x)
    z = complex(x)
    if z.imag == 0:
        return repr(z.real)
    return repr(z)


def format_residual(x) -> str:
    if isinstance(x, (Fraction, int)) and x == 0:
        return "0 (exact)"
    return f"{float(x):.3e}"


def _load(args):
    cfg = FamilyConfig.load(args.config)
    model = build_model(cfg, args.backend)
    tol = args.tol if args.tol is not None else cfg.tolerance
    return cfg, model, tol


def _parse_t(values, backend):
    from .config import parse_scalar

    out = []
    for v in values:
        try:
            out.append(parse_scalar(v, backend))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad flow time {v!r}") from exc
    return out


def cmd_build(args) -> int:
    cfg, model, tol = _load(args)
    sys_ = model.system
    rep = verify_rank_one(sys_, tol)
    print(f"family: {cfg.family}  n={sys_.n}  N={sys_.N}  backend={sys_.backend}")
    ok = rep.passed
    for name, v in rep.rows():
        shown = v if isinstance(v, int) or v is None else format_residual(v)
        print(f"{name}: {shown}")
    Bspec, Dspec, note = lemma_pair(sys_)
    suffix = f" [{note}]" if note else ""
    for name, v in lemma_identities(Bspec, Dspec, sys_.backend).items():
        ok = ok and (v == 0 or float(v) <= tol)
        print(f"{name}: {format_residual(v)}{suffix}")
    print("PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_tau(args) -> int:
    cfg, model, _ = _load(args)
    sys_ = model.system
    t = _parse_t(args.t, sys_.backend)
    if len(t) > cfg.K:
        raise ConfigError(f"{len(t)} flow times given but K = {cfg.K}")
    print(format_scalar(tau_general(sys_, la.as_flow(t, sys_.backend, cfg.K))))
    if args.all_forms:
        Bspec, Dspec, note = lemma_pair(sys_)
        be = sys_.backend
        forms = tau_W_BCD(Bspec, sys_.C, Dspec, t, be)
        if note:
            print(f"# three forms use an {note}")
        for label, v in zip(("det(A(B,D) E C^T)", "det(A0 E r_D(B) C^T)", "det(A(B) E C^T)/kappa"), forms):
            print(f"{label}: {format_scalar(v)}")
        print(f"max pairwise relative difference: {format_residual(max_pairwise_rel(forms))}")
    return EXIT_OK


def cmd_expand(args) -> int:
    cfg, model, _ = _load(args)
    terms = schur_expansion(model.system, args.max_weight)
    rows = [term for term in terms if args.all_rows or term.coefficient != 0]
    header = ["partition", "frobenius", "raw", "coefficient", "unnormalized", "sign_flag"]
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        if cfg.family == "rational" and args.max_weight >= cfg.n * cfg.k:
            out.write("# EXACT (finite)\n")
        writer = csv.writer(out)
        writer.writerow(header)
        for term in rows:
            writer.writerow([str(term.partition), str(term.frobenius), format_scalar(term.raw),
                             format_scalar(term.coefficient), format_scalar(term.unnormalized),
                             int(term.sign_flag)])
    finally:
        if args.out:
            out.close()
    if args.out:
        plot_coefficients([str(term.partition) for term in rows], [complex(term.coefficient) for term in rows],
                          figure_path(args.out))
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg, model, tol = _load(args)
    sys_ = model.system
    if args.corrupt:
        A = sys_.A.copy()
        A[0, 0] = A[0, 0] + (Fraction(1, 1000) if sys_.backend == EXACT else 1e-3)
        sys_ = sys_.replace(A=A)
    battery = run_battery(sys_, args.samples, args.seed, tol)
    print(battery.table())
    summary = {"family": cfg.family, "backend": sys_.backend, "seed": args.seed, "samples": args.samples,
               "corrupted": bool(args.corrupt), **battery.to_json()}
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(json.dumps(summary, indent=2))
    print("summary: " + json.dumps(summary))
    return EXIT_OK if battery.passed else EXIT_FAIL


def _axis(spec, name):
    lo, hi, count = float(spec[0]), float(spec[1]), int(spec[2])
    if count < 1:
        raise ConfigError(f"{name}: step count must be positive")
    return np.linspace(lo, hi, count)


def grid_field(sys_, xs, ys, ts, axes=(1, 2, 3), h=1e-4, threshold=1e-10, K=None):
    """``u = 2 d^2/dx^2 log tau`` on the grid; returns ``(u, flags)`` indexed ``[it, iy, ix]``.

    Points where ``|tau|`` falls below ``threshold`` times the largest value on
    the grid are flagged and get ``u = nan``.
    """
    if len(set(axes)) != 3 or min(axes) < 1:
        raise ConfigError("grid axes must be three distinct positive flow indices")
    model = sys_.with_backend(FLOAT) if sys_.backend == EXACT else sys_
    K = max(max(axes), K or 0)
    shape = (len(ts), len(ys), len(xs))
    vals = np.empty(shape + (3,), dtype=complex)
    for it, tv in enumerate(ts):
        for iy, yv in enumerate(ys):
            for ix, xv in enumerate(xs):
                for k, dx in enumerate((-h, 0.0, h)):
                    flow = [0.0] * K
                    flow[axes[0] - 1] = xv + dx
                    flow[axes[1] - 1] = yv
                    flow[axes[2] - 1] = tv
                    vals[it, iy, ix, k] = complex(tau_general(model, flow))
    tm, t0, tp = vals[..., 0], vals[..., 1], vals[..., 2]
    scale = max(np.abs(t0).max(), 1e-300)
    flags = np.abs(t0) < threshold * scale
    with np.errstate(divide="ignore", invalid="ignore"):
        d1 = (tp - tm) / (2 * h)
        d2 = (tp - 2 * t0 + tm) / h**2
        u = (2 * (t0 * d2 - d1**2) / t0**2).real
    u[flags] = np.nan
    return u, flags


def cmd_grid(args) -> int:
    cfg, model, _ = _load(args)
    xs, ys, ts = _axis(args.x, "--x"), _axis(args.y, "--y"), _axis(args.time, "--time")
    u, flags = grid_field(model.system, xs, ys, ts, tuple(args.axes), args.h, args.threshold, cfg.K)
    path = Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "t", "u", "flag"])
        for it, tv in enumerate(ts):
            for iy, yv in enumerate(ys):
                for ix, xv in enumerate(xs):
                    writer.writerow([repr(float(xv)), repr(float(yv)), repr(float(tv)), repr(float(u[it, iy, ix])),
                                     int(flags[it, iy, ix])])
    if not args.no_plot:
        plot_field(xs, ys, ts, u, figure_path(path))
    print(f"wrote {path} ({u.size} rows, {int(flags.sum())} flagged)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("config", help="JSON family configuration")
    common.add_argument("--backend", choices=[EXACT, FLOAT], default=None)
    common.add_argument("--tol", type=float, default=None, help="relative tolerance override")

    parser = argparse.ArgumentParser(prog="kptau", description="Finite-determinant KP tau functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="construct the family and check the rank-one identities")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("tau", parents=[common], help="evaluate tau at flow times t1 t2 ...")
    p.add_argument("t", nargs="*", help="flow times (numbers or p/q)")
    p.add_argument("--all-forms", action="store_true", help="also print the three equivalent determinant forms")
    p.set_defaults(func=cmd_tau)

    p = sub.add_parser("expand", parents=[common], help="Schur expansion coefficients as CSV")
    p.add_argument("--max-weight", type=int, default=4)
    p.add_argument("--all-rows", action="store_true", help="keep rows whose coefficient is exactly zero")
    p.add_argument("--out", help="CSV path; a bar chart is written next to it")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("verify", parents=[common], help="run the property battery")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--corrupt", action="store_true", help="perturb A[0,0] by 1e-3 before checking")
    p.add_argument("--out", help="write the JSON summary here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("grid", parents=[common], help="tabulate u = 2 d_x^2 log tau on a grid")
    p.add_argument("--x", nargs=3, default=["-5", "5", "101"], metavar=("MIN", "MAX", "COUNT"))
    p.add_argument("--y", nargs=3, default=["0", "0", "1"], metavar=("MIN", "MAX", "COUNT"))
    p.add_argument("--time", nargs=3, default=["0", "0", "1"], metavar=("MIN", "MAX", "COUNT"))
    p.add_argument("--axes", nargs=3, type=int, default=[1, 2, 3], metavar=("X", "Y", "T"),
                   help="flow indices mapped to x, y and time")
    p.add_argument("--h", type=float, default=1e-4, help="central-difference step")
    p.add_argument("--threshold", type=float, default=1e-10, help="relative |tau| below which rows are flagged")
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--out", required=True, help="CSV path; the figure goes next to it")
    p.set_defaults(func=cmd_grid)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DEGENERATE as exc:
        print(f"degenerate model: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ConfigError, BackendUnsupported, KPTauError, ValueError, OSError) as exc:
        print(f"input error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
