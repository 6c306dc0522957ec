"""Command-line interface: ``casimir-cone {cone,wedge,sweep,thermal,verify}``.

Exit codes: 0 success, 1 a computation failed to converge or a verification
check failed, 2 invalid input.
"""

import argparse
import csv
import json
import math
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import verify as verify_mod
from .cone import ConeConfig, ConeDomainError, cone_energy
from .quadrature import QuadSpec
from .specfun import SpecfunAccuracyError, SpecfunDomainError
from .thermal import PolarizabilityModel, ThermalConfig, thermal_energy
from .wedge import WedgeConfig, WedgeDomainError, wedge_energy_closed, wedge_energy_integral, wedge_energy_relative

THREADS_ENV = "CASIMIR_CONE_THREADS"
CSV_HEADER = ["theta0", "theta", "u_hat", "u_hat_scaled", "err", "m_max"]

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

_INPUT_ERRORS = (ConeDomainError, WedgeDomainError, SpecfunDomainError, ValueError)


def _fmt(v):
    return f"{v:.17g}"


def _angle(value, deg):
    return value * math.pi / 180.0 if deg else float(value)


def _spec(args):
    return QuadSpec(rel_tol=args.rel_tol, abs_tol=args.abs_tol)


def _worker_count():
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return os.cpu_count() or 1
    n = int(raw)
    if n < 1:
        raise ValueError(f"{THREADS_ENV} must be a positive integer")
    return n


def _print_result(kind, inputs, res, as_json):
    fields = {
        "u_hat": res.u_hat,
        "err": res.err,
        "m_max_used": res.m_max_used,
        "electric": res.electric,
        "magnetic": res.magnetic,
        "ghost": res.ghost,
        "converged": bool(res.converged),
    }
    if as_json:
        record = {"command": kind, **inputs, **{k: (float(v) if isinstance(v, (float, np.floating)) else v)
                                                for k, v in fields.items()}}
        print(json.dumps(record))
        return
    for k, v in inputs.items():
        print(f"{k:<11s}= {_fmt(v)}")
    for k, v in fields.items():
        if isinstance(v, bool):
            print(f"{k:<11s}= {'yes' if v else 'no'}")
        elif isinstance(v, int):
            print(f"{k:<11s}= {v}")
        else:
            print(f"{k:<11s}= {_fmt(v)}")


# --------------------------------------------------------------------------
# subcommands


def cmd_cone(args):
    cfg = ConeConfig(_angle(args.theta0, args.deg), _angle(args.theta, args.deg), args.r)
    res = cone_energy(cfg, _spec(args))
    _print_result("cone", {"theta0": cfg.theta0, "theta": cfg.theta, "r": cfg.r}, res, args.json)
    return EXIT_OK if res.converged else EXIT_FAILED


def cmd_wedge(args):
    cfg = WedgeConfig(_angle(args.theta0, args.deg), _angle(args.theta, args.deg), args.r)
    spec = _spec(args)
    closed = wedge_energy_closed(cfg)
    integral = wedge_energy_integral(cfg, spec)
    record = {
        "theta0": cfg.theta0,
        "theta": cfg.theta,
        "closed_form": closed,
        "lambda_integral": integral.value,
        "lambda_integral_err": integral.err,
        "difference": integral.value - closed,
    }
    ok = integral.converged
    if args.ref_theta is not None:
        ref = _angle(args.ref_theta, args.deg)
        rel = wedge_energy_relative(cfg, ref, spec)
        closed_diff = closed - wedge_energy_closed(WedgeConfig(cfg.theta0, ref, cfg.r))
        record.update({
            "ref_theta": ref,
            "relative_integral": rel.value,
            "relative_err": rel.err,
            "closed_difference": closed_diff,
            "relative_difference": rel.value - closed_diff,
        })
        ok = ok and rel.converged
    if args.json:
        print(json.dumps({"command": "wedge", **{k: float(v) for k, v in record.items()}}))
    else:
        for k, v in record.items():
            print(f"{k:<20s}= {_fmt(v)}")
    return EXIT_OK if ok else EXIT_FAILED


def cmd_thermal(args):
    cfg = ConeConfig(_angle(args.theta0, args.deg), _angle(args.theta, args.deg), args.r)
    if args.model == "static":
        model = PolarizabilityModel()
    else:
        model = PolarizabilityModel("single-oscillator", omega0=args.omega0)
    res = thermal_energy(cfg, ThermalConfig(args.tau, model), _spec(args))
    inputs = {"theta0": cfg.theta0, "theta": cfg.theta, "r": cfg.r, "tau": args.tau}
    _print_result("thermal", inputs, res, args.json)
    return EXIT_OK if res.converged else EXIT_FAILED


def cmd_verify(args):
    checks = verify_mod.run(args.level, _spec(args), negate_ghost=args.negate_ghost)
    for c in checks:
        print(c.line())
    failed = [c for c in checks if not c.passed]
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    return EXIT_OK if not failed else EXIT_FAILED


def sweep_grid(theta0_range, theta_range=None, theta_above=None, deg=False):
    """Ordered (θ₀, θ) points, θ₀-major; invalid pairs (θ ≤ θ₀) are dropped."""
    t0s = np.linspace(_angle(theta0_range[0], deg), _angle(theta0_range[1], deg), int(theta0_range[2]))
    points = []
    for t0 in t0s:
        t0 = float(t0)
        if theta_range is not None:
            ths = np.linspace(_angle(theta_range[0], deg), _angle(theta_range[1], deg), int(theta_range[2]))
        else:
            offset, count = theta_above
            ths = np.linspace(t0 + _angle(offset, deg), math.pi, int(count))
        for th in ths:
            th = min(float(th), math.pi)
            if t0 < th and 0.0 < t0 < math.pi:
                points.append((t0, th))
    return points


def sweep_point(point, rel_tol=1e-8, abs_tol=1e-12):
    """One CSV row; failures become NaN sentinels instead of exceptions."""
    t0, th = point
    spec = QuadSpec(rel_tol=rel_tol, abs_tol=abs_tol)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            res = cone_energy(ConeConfig(t0, th), spec)
    except (ArithmeticError, ValueError):
        return [t0, th, math.nan, math.nan, math.nan, -1]
    err = res.err if res.converged else math.nan
    return [t0, th, res.u_hat, res.u_hat * math.sin(th - t0) ** 4, err, res.m_max_used]


def _sweep_rows(points, rel_tol, abs_tol, workers):
    args = [(p, rel_tol, abs_tol) for p in points]
    if workers <= 1 or len(points) <= 1:
        return [sweep_point(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map preserves submission order, so the output is thread-count independent
        return list(pool.map(_sweep_star, args, chunksize=max(1, len(args) // (4 * workers))))


def _sweep_star(a):
    return sweep_point(*a)


def cmd_sweep(args):
    if args.theta0[2] < 1 or (args.theta is not None and args.theta[2] < 1) or (
        args.theta_above is not None and args.theta_above[1] < 1
    ):
        raise ValueError("sweep counts must be >= 1")
    points = sweep_grid(args.theta0, args.theta, args.theta_above, args.deg)
    if not points:
        raise ValueError("sweep grid is empty: theta must exceed theta0 at some point")
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="")
    try:
        rows = _sweep_rows(points, args.rel_tol, args.abs_tol, _worker_count())
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, float) else str(v) for v in row])
    finally:
        if out is not sys.stdout:
            out.close()
    failed = sum(1 for row in rows if math.isnan(row[4]))
    if failed:
        print(f"error: {failed} of {len(rows)} sweep points did not converge (err = nan)", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


# --------------------------------------------------------------------------
# parser


def _add_common(p):
    p.add_argument("--rel-tol", type=float, default=1e-8, help="relative tolerance (default 1e-8)")
    p.add_argument("--abs-tol", type=float, default=1e-12, help="absolute tolerance (default 1e-12)")
    p.add_argument("--deg", action="store_true", help="angles are given in degrees")
    p.add_argument("--json", action="store_true", help="print one machine-readable JSON line")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="casimir-cone",
        description="Casimir-Polder energy of a polarizable particle near a conducting cone or wedge.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cone", help="zero-temperature energy near a cone")
    p.add_argument("--theta0", type=float, required=True, help="cone half-opening angle")
    p.add_argument("--theta", type=float, required=True, help="particle polar angle (pi = on axis)")
    p.add_argument("--r", type=float, default=1.0, help="distance from the vertex")
    _add_common(p)
    p.set_defaults(func=cmd_cone)

    p = sub.add_parser("wedge", help="wedge energy: closed form against the lambda integral")
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--ref-theta", type=float, default=None, help="also report U(theta) - U(ref)")
    _add_common(p)
    p.set_defaults(func=cmd_wedge)

    p = sub.add_parser("sweep", help="CSV grid of cone energies")
    p.add_argument("--theta0", type=float, nargs=3, required=True, metavar=("START", "STOP", "COUNT"))
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float, nargs=3, metavar=("START", "STOP", "COUNT"),
                   help="absolute theta range; points with theta <= theta0 are skipped")
    g.add_argument("--theta-above", type=float, nargs=2, metavar=("OFFSET", "COUNT"),
                   help="per theta0, COUNT points from theta0 + OFFSET up to pi")
    p.add_argument("--out", required=True, help="CSV output path, '-' for stdout")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("thermal", help="finite-temperature Matsubara sum")
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--tau", type=float, required=True, help="2 pi k_B T r / (hbar c)")
    p.add_argument("--model", choices=("static", "oscillator"), default="static")
    p.add_argument("--omega0", type=float, default=1.0, help="oscillator scale, in units of 1/r")
    _add_common(p)
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("verify", help="run the identity and limit checks")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--negate-ghost", action="store_true", help=argparse.SUPPRESS)
    _add_common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(args, "theta0") and args.command == "sweep":
        args.theta0 = [args.theta0[0], args.theta0[1], int(args.theta0[2])]
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpecfunAccuracyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
