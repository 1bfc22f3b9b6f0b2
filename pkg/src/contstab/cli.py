"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import asdict
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import nystrom, powerlaw, tikhonov
from ._validation import make_geometry, parse_pair
from .exceptions import ConfigurationError, DomainError, NumericalError
from .geometry import Annulus, BernsteinEllipse, HalfPlaneGeometry, inverse_joukowski, joukowski, mobius
from .spectral import basis_for
from .verify import run_checks, summary

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

DEFAULT_RHO, DEFAULT_R = 0.25, 0.5
DEFAULT_Z = "0.75,0"
DEFAULT_RANGE = "1e-8,1e-3,11"
DEFAULT_EPS = 1e-4
SWEEP_COLUMNS = ("eps", "bound", "M_at_z", "u_at_z", "norm_H", "norm_Gamma", "eta_star_ratio")


def fmt(x) -> str:
    return format(float(x), ".17g")


def threads() -> int:
    raw = os.environ.get("CONTSTAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigurationError(f"CONTSTAB_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigurationError(f"CONTSTAB_THREADS must be a positive integer, got {raw!r}")
    return n


# --- argument handling ------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--annulus", metavar="RHO,R", help="annulus rho < |z| < 1, data on |z| = R")
    g.add_argument("--halfplane", metavar="R", type=float, help="upper half-plane, data on |z - i| = R")
    g.add_argument("--ellipse", metavar="R", type=float, help="Bernstein ellipse E_R, data on [-1, 1]")
    p.add_argument("--z", default=DEFAULT_Z, metavar="RE,IM", help="evaluation point (default 0.75,0)")
    p.add_argument("--eps", type=float, help=f"single precision level (default {DEFAULT_EPS:g})")
    p.add_argument("--eps-range", default=DEFAULT_RANGE, metavar="LO,HI,N", help="geometric eps grid")
    p.add_argument("--nodes", type=int, default=256, metavar="M", help="quadrature nodes (even, >= 16)")
    p.add_argument("--tol", type=float, default=1e-12, help="series truncation tolerance")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="contstab", description="Optimal stability of analytic continuation.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    sub.add_parser("exponent", parents=[common], help="closed-form stability exponent at z")
    sub.add_parser("sweep", parents=[common], help="bound, maximizer and norms over an eps grid")
    sp = sub.add_parser("spectrum", parents=[common], help="Nystrom eigenvalues against the closed form")
    sp.add_argument("--method", choices=("accurate", "dense"), default="accurate")
    mp = sub.add_parser("maximizer", parents=[common], help="tabulate the worst-case function on a grid")
    mp.add_argument("--grid", type=int, default=16, metavar="N", help="points on the level curve through z")
    vp = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    vp.add_argument("--json", action="store_true", help="structured report instead of lines")
    vp.add_argument("--lemma-a1", metavar="ALPHA,BETA", help="also run the sum-asymptotics harness")
    vp.add_argument("--slope-target", type=float, help="override the expected exponent (negative control)")
    return parser


def geometry_from(args):
    if args.halfplane is not None:
        return make_geometry("halfplane", r=args.halfplane)
    if args.ellipse is not None:
        return make_geometry("ellipse", R=args.ellipse)
    if args.annulus is not None:
        rho, r = parse_pair(args.annulus, "--annulus")
        return make_geometry("annulus", rho=rho, r=r)
    return make_geometry("annulus", rho=DEFAULT_RHO, r=DEFAULT_R)


def point_from(args) -> complex:
    re, im = parse_pair(args.z, "--z")
    return complex(re, im)


def eps_range_from(args):
    parts = args.eps_range.split(",")
    if len(parts) != 3:
        raise ConfigurationError(f"--eps-range expects LO,HI,N, got {args.eps_range!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ConfigurationError(f"--eps-range: cannot parse {args.eps_range!r}") from exc
    if not (0.0 < lo < hi < 1.0):
        raise ConfigurationError(f"--eps-range needs 0 < LO < HI < 1, got {lo!r}, {hi!r}")
    if n < 5:
        raise ConfigurationError(f"--eps-range needs N >= 5, got {n}")
    if lo < tikhonov.EPS_FLOOR:
        raise DomainError(f"LO={lo:g} is below the supported floor {tikhonov.EPS_FLOOR:g}")
    return lo, hi, n


def _pair(z: complex):
    return [z.real, z.imag]


# --- output -----------------------------------------------------------------


def _csv(header, rows, footer=()):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(c if isinstance(c, str) else fmt(c) for c in row) + "\n")
    for key, value in footer:
        buf.write(f"# {key}={value if isinstance(value, str) else fmt(value)}\n")
    return buf.getvalue()


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"


def emit(text: str, args):
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


# --- commands ---------------------------------------------------------------


def cmd_exponent(args) -> int:
    g = geometry_from(args)
    z = point_from(args)
    gamma = tikhonov.exponent(g, z)
    stable = tikhonov.stable_region(g, z)
    if args.format == "json":
        obj = {"geometry": g.to_dict(), "z": _pair(z), "gamma": gamma, "stable_region": stable}
        if isinstance(g, BernsteinEllipse):
            obj["alpha"] = gamma
        emit(_json(obj), args)
    else:
        emit(_csv(("z_re", "z_im", "gamma", "stable_region"),
                  [(z.real, z.imag, gamma, str(stable).lower())],
                  _geometry_footer(g)), args)
    return EXIT_OK


def _geometry_footer(g):
    return [(k, v if isinstance(v, str) else float(v)) for k, v in g.to_dict().items()]


def _sweep_row(g, z, eps, tol):
    sol = tikhonov.solve(g, z, eps, tol)
    b = tikhonov.bound(sol)
    mx = tikhonov.maximizer(g, z, eps, tol)
    cert = tikhonov.dual_certificate(g, z, eps, tol)
    return [eps, b.bound_value, abs(mx.value_at_z), sol.value_at_z, sol.norm_H, sol.norm_Gamma,
            cert.ratio_eta_eps2]


def cmd_sweep(args) -> int:
    g = geometry_from(args)
    z = point_from(args)
    lo, hi, n = eps_range_from(args)
    gamma = tikhonov.exponent(g, z)
    grid = powerlaw.geometric_grid(lo, hi, n)

    def one(eps):
        try:
            return _sweep_row(g, z, float(eps), args.tol), None
        except NumericalError as exc:
            return None, exc

    nthreads = threads()
    if nthreads > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            results = list(pool.map(one, grid))
    else:
        results = [one(e) for e in grid]

    rows, failure = [], None
    for eps, (row, exc) in zip(grid, results):
        if exc is not None:
            failure = (eps, exc)
            break
        rows.append(row)

    if failure is not None:
        eps, exc = failure
        message = str(exc).replace(",", ";").replace("\n", " ")
        table = [r + [""] for r in rows] + [[eps] + ["nan"] * (len(SWEEP_COLUMNS) - 1) + [message]]
        if args.format == "json":
            emit(_json({"geometry": g.to_dict(), "z": _pair(z), "columns": list(SWEEP_COLUMNS),
                        "rows": rows, "error": {"eps": eps, "message": str(exc)}}), args)
        else:
            emit(_csv(SWEEP_COLUMNS + ("error",), table), args)
        print(f"contstab: numerical failure at eps={fmt(eps)}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC

    arr = np.array(rows)
    fits = {}
    for name, col in (("bound", 1), ("M_at_z", 2), ("u_at_z", 3), ("norm_H", 4), ("norm_Gamma", 5)):
        fits[name] = powerlaw.fit_loglog(arr[:, 0], arr[:, col]).slope
    meta = [("gamma", gamma)] + [(f"slope_{k}", v) for k, v in fits.items()]
    if args.format == "json":
        emit(_json({"geometry": g.to_dict(), "z": _pair(z), "columns": list(SWEEP_COLUMNS),
                    "rows": rows, "gamma": gamma, "slopes": fits}), args)
    else:
        emit(_csv(SWEEP_COLUMNS, rows, meta), args)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    g = geometry_from(args)
    op = nystrom.build(g, args.nodes)
    spec = nystrom.spectrum(op, args.method)
    mu = spec.eigenvalues
    basis = basis_for(g)
    lam = np.sort(basis.eigenvalue(basis.indices(mu.size)))[::-1][: mu.size]
    rows = [[k, mu[k], lam[k], abs(mu[k] / lam[k] - 1.0)] for k in range(mu.size)]
    meta = [("method", spec.method), ("noise_floor", spec.noise_floor), ("valid_count", float(spec.valid_count)),
            ("decay_slope", spec.slope)]
    parf = None
    if isinstance(g, Annulus) and g.rho <= 1e-8:
        parf = nystrom.parfenov_rate(op, spec)
        meta += [("parfenov_rho_hat", parf.rho_hat), ("parfenov_r_squared", parf.r_squared)]
    branches = None
    if isinstance(g, Annulus) and g.rho > 1e-8:
        branches = nystrom.annulus_branch_rates(op, spec)
        meta += [("outer_rate", branches.outer_rate), ("outer_expected", branches.outer_expected),
                 ("inner_rate", branches.inner_rate), ("inner_expected", branches.inner_expected)]
    if args.format == "json":
        obj = {"geometry": g.to_dict(), "nodes": op.size, "columns": ["index", "mu_numeric", "lambda_analytic", "rel_err"],
               "rows": rows, "method": spec.method, "noise_floor": spec.noise_floor,
               "valid_count": spec.valid_count, "decay_slope": spec.slope}
        if parf is not None:
            obj["parfenov"] = {"rho_hat": parf.rho_hat, "r_squared": parf.r_squared}
        if branches is not None:
            obj["branch_rates"] = asdict(branches)
        emit(_json(obj), args)
    else:
        emit(_csv(("index", "mu_numeric", "lambda_analytic", "rel_err"),
                  [[str(r[0])] + r[1:] for r in rows], meta), args)
    return EXIT_OK


def _level_curve(g, z, n):
    """``n`` points on the level set of the exponent through ``z``."""
    theta = 2.0 * np.pi * np.arange(n) / n
    if isinstance(g, Annulus):
        return abs(z) * np.exp(1j * (theta + np.angle(z)))
    if isinstance(g, HalfPlaneGeometry):
        m = complex(mobius(z, g))
        w = abs(m) * np.exp(1j * (theta + np.angle(m)))
        z0 = g.z0
        return z0 * (1.0 + w) / (1.0 - w)
    w = inverse_joukowski(z, g.R)
    return joukowski(abs(w) * np.exp(1j * (theta + np.angle(w))))


def cmd_maximizer(args) -> int:
    g = geometry_from(args)
    z = point_from(args)
    eps = DEFAULT_EPS if args.eps is None else args.eps
    if args.grid < 1:
        raise ConfigurationError("--grid must be positive")
    mx = tikhonov.maximizer(g, z, eps, args.tol)
    pts = _level_curve(g, z, args.grid)
    vals = np.atleast_1d(mx(pts))
    rows = [[p.real, p.imag, v.real, v.imag, abs(v)] for p, v in zip(pts, vals)]
    at_z = mx.value_at_z
    meta = [("eps", eps), ("gamma", mx.gamma), ("M_at_z", abs(at_z)), ("norm_H", mx.norm_H),
            ("norm_Gamma", mx.norm_Gamma), ("sup_boundary", mx.sup_norm())]
    if isinstance(g, BernsteinEllipse) and eps < 1.0:
        meta.append(("polynomial_at_z", abs(tikhonov.demanet_townsend_poly(z, eps, g.R))))
    columns = ("zeta_re", "zeta_im", "M_re", "M_im", "M_abs")
    if args.format == "json":
        emit(_json({"geometry": g.to_dict(), "z": _pair(z), "columns": list(columns), "rows": rows,
                    **{k: v for k, v in meta}}), args)
    else:
        emit(_csv(columns, rows, meta), args)
    return EXIT_OK


def cmd_verify(args) -> int:
    g = geometry_from(args)
    z = point_from(args)
    lo, hi, n = eps_range_from(args)
    lemma = parse_pair(args.lemma_a1, "--lemma-a1") if args.lemma_a1 else None
    checks = run_checks(g, z, lo, hi, n, args.nodes, args.tol, slope_target=args.slope_target, lemma=lemma)
    if args.json:
        emit(_json(summary(checks)), args)
    else:
        emit("".join(c.line() + "\n" for c in checks), args)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VERIFY


COMMANDS = {
    "exponent": cmd_exponent,
    "sweep": cmd_sweep,
    "spectrum": cmd_spectrum,
    "maximizer": cmd_maximizer,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        threads()
        return COMMANDS[args.command](args)
    except DomainError as exc:
        print(f"contstab: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"contstab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"contstab: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
