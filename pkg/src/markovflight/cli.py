"""Command-line front end.

Exit codes: 0 success, 1 validation failure (a check did not pass or a series
did not converge), 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import math
import sys
from dataclasses import dataclass

from . import __version__
from .charfn import (
    EvalPoint,
    cf_bessel_series,
    cf_time_series,
    laplace_cf_closed,
    laplace_numeric_roundtrip,
)
from .coeffs import (
    FlightParams,
    Kind,
    derived_by_determinant,
    derived_by_recurrence,
    gamma_even_odd_split,
    to_json,
)
from .moments import eval_moment_series, mixed_moment_all_ones, mixed_moment_all_twos_series
from .simulate import (
    McConfig,
    default_workers,
    estimate_cf,
    estimate_mixed_moment,
    estimate_no_switch_fraction,
    mc_to_json,
    z_score,
)
from .specfun import ConvergenceError

CSV_VERSION = "# markovflight eval csv v1"
CSV_COLUMNS = [
    "m", "lambda", "c", "a", "t",
    "value_bessel", "value_time", "terms_b", "terms_t", "tail_b", "tail_t",
]


class UsageError(Exception):
    pass


def _dump_json(obj) -> str:
    return json.dumps(obj, allow_nan=False, sort_keys=False) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _params(args) -> FlightParams:
    try:
        return FlightParams(args.m, args.lam, args.c)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# -- subcommands ------------------------------------------------------------------


def cmd_coeffs(args) -> int:
    if args.m < 3:
        raise UsageError("m must be >= 3")
    if args.n < 0:
        raise UsageError("n must be >= 0")
    kind = Kind(args.kind)
    if args.method == "recurrence":
        poly = derived_by_recurrence(kind, args.m, max(args.n, 1)).derived[args.n]
    elif args.method == "determinant":
        poly = derived_by_determinant(kind, args.m, args.n)
    else:
        if kind is not Kind.TIME:
            raise UsageError("the even/odd split exists only for --kind time")
        poly = gamma_even_odd_split(args.m, max(args.n, 1)).derived[args.n]
    _emit(_dump_json(to_json(kind, args.m, args.n, poly)), args.output)
    return 0


def eval_rows(params: FlightParams, a_values, t_values, tol: float, max_terms: int) -> list[list]:
    rows = []
    for a, t in itertools.product(a_values, t_values):
        pt = EvalPoint(a, t)
        b = cf_bessel_series(params, pt, tol, max_terms)
        ts = cf_time_series(params, pt, tol, max_terms)
        rows.append([
            params.m, params.lam, params.c, a, t,
            b.value, ts.value, b.terms_used, ts.terms_used, b.tail_estimate, ts.tail_estimate,
        ])
    return rows


def cmd_eval(args) -> int:
    params = _params(args)
    if any(t <= 0 for t in args.t) or any(a < 0 for a in args.a):
        raise UsageError("need t > 0 and a >= 0")
    rows = eval_rows(params, args.a, args.t, args.tol, args.max_terms)
    if args.format == "json":
        text = _dump_json([dict(zip(CSV_COLUMNS, row)) for row in rows])
    else:
        buf = io.StringIO()
        buf.write(CSV_VERSION + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
        text = buf.getvalue()
    _emit(text, args.output)
    return 0


def cmd_laplace_check(args) -> int:
    params = _params(args)
    if args.s <= 0:
        raise UsageError("s must be > 0")
    closed = laplace_cf_closed(params, args.a, args.s)
    numeric = laplace_numeric_roundtrip(params, args.a, args.s, tol=args.quad_tol)
    diff = abs(closed - numeric)
    ok = diff <= args.tol
    report = {
        "m": params.m, "lambda": params.lam, "c": params.c, "a": args.a, "s": args.s,
        "closed": closed, "numeric": numeric, "abs_diff": diff, "tol": args.tol, "ok": ok,
    }
    _emit(_dump_json(report), args.output)
    return 0 if ok else 1


def _alpha(args, m: int) -> list[float]:
    if args.alpha is not None:
        if len(args.alpha) != m:
            raise UsageError(f"--alpha needs {m} components")
        return list(args.alpha)
    return [args.a] + [0.0] * (m - 1)


def cmd_simulate(args) -> int:
    params = _params(args)
    if args.t <= 0:
        raise UsageError("t must be > 0")
    cfg = McConfig(params, args.t, args.samples, args.seed, args.workers or default_workers())
    if args.estimand == "cf":
        est = estimate_cf(cfg, _alpha(args, params.m))
    elif args.estimand == "moment":
        q = args.q if args.q is not None else [2] * params.m
        if len(q) != params.m or min(q) < 0:
            raise UsageError(f"--q needs {params.m} nonnegative integers")
        est = estimate_mixed_moment(cfg, q)
    else:
        est = estimate_no_switch_fraction(cfg)
    report = mc_to_json(args.estimand, est)
    report["workers"] = cfg.workers
    _emit(_dump_json(report), args.output)
    return 0


def cmd_moments(args) -> int:
    if args.m < 3:
        raise UsageError("m must be >= 3")
    if args.q == "ones":
        series = mixed_moment_all_ones(args.m)
    else:
        try:
            series = mixed_moment_all_twos_series(args.m, args.order)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    report = series.to_json()
    if args.t is not None:
        if args.t <= 0:
            raise UsageError("t must be > 0")
        report["lambda"] = args.lam
        report["c"] = args.c
        report["t"] = args.t
        report["value_at_t"] = eval_moment_series(series, args.lam, args.c, args.t)
    _emit(_dump_json(report), args.output)
    return 0


# -- compare ----------------------------------------------------------------------

SERIES_GRID = dict(
    m=(3, 4, 5, 6), lam=(0.5, 1.0, 2.0), a=(0.1, 0.5, 1.0, 2.0, 5.0), t=(0.25, 0.5, 1.0, 2.0)
)
MC_POINTS = (
    (3, 0.5, 1.0, 0.5), (3, 1.0, 1.0, 1.0), (3, 2.0, 0.5, 1.0), (3, 1.0, 2.0, 0.5),
    (5, 0.5, 1.0, 0.5), (5, 1.0, 1.0, 1.0), (5, 2.0, 0.5, 1.0), (5, 1.0, 2.0, 0.5),
)  # (m, lambda, a, t), c = 1
LAPLACE_POINTS = (
    (3, 1.0, 1.0, 2.0), (3, 0.5, 0.5, 1.0), (3, 2.0, 1.0, 1.5), (3, 1.0, 2.0, 3.0),
    (4, 1.0, 1.0, 2.0), (4, 2.0, 0.5, 1.0), (5, 2.0, 0.5, 3.0), (5, 1.0, 1.0, 1.5),
    (6, 0.5, 1.0, 2.0), (6, 1.0, 0.25, 0.5), (7, 1.0, 1.0, 2.5), (8, 2.0, 0.5, 1.0),
)  # (m, lambda, a, s), c = 1
FAULT_DELTA = 1e-3


@dataclass
class CompareConfig:
    samples: int = 1_000_000
    seed: int = 42
    workers: int = 1
    tol: float = 1e-10
    series_threshold: float = 1e-8
    laplace_threshold: float = 1e-6
    inject_fault: bool = False
    sigma_gate: float | None = None

    def gate(self) -> float:
        if self.sigma_gate is not None:
            return self.sigma_gate
        # fewer samples: same statistics, but a looser gate for the 16 joint checks
        return 3.0 if self.samples >= 1_000_000 else 4.0


def _time_value(params: FlightParams, pt: EvalPoint, cfg: CompareConfig) -> float:
    value = cf_time_series(params, pt, cfg.tol).value
    if cfg.inject_fault:
        # gamma_3 corrupted by FAULT_DELTA * v
        v = (params.c * pt.a) ** 2
        value += math.exp(-params.lam * pt.t) * FAULT_DELTA * v * pt.t**2 / 2
    return value


def compare(cfg: CompareConfig) -> dict:
    """Run the cross-validation grid and report max deviations against thresholds."""
    worst_series = 0.0
    for m, lam, a, t in itertools.product(*SERIES_GRID.values()):
        params, pt = FlightParams(m, lam, 1.0), EvalPoint(a, t)
        diff = abs(cf_bessel_series(params, pt, cfg.tol).value - _time_value(params, pt, cfg))
        worst_series = max(worst_series, diff)

    worst_z = 0.0
    for i, (m, lam, a, t) in enumerate(MC_POINTS):
        params = FlightParams(m, lam, 1.0)
        mc = McConfig(params, t, cfg.samples, cfg.seed + i, cfg.workers)
        est = estimate_cf(mc, [a] + [0.0] * (m - 1))
        target = _time_value(params, EvalPoint(a, t), cfg)
        worst_z = max(worst_z, z_score(est.mean, target, est.stderr), z_score(est.imag, 0.0, est.imag_stderr))

    worst_laplace = 0.0
    for m, lam, a, s in LAPLACE_POINTS:
        params = FlightParams(m, lam, 1.0)
        numeric = laplace_numeric_roundtrip(
            params, a, s, evaluator=lambda p, pt: _time_value(p, pt, cfg)
        )
        worst_laplace = max(worst_laplace, abs(numeric - laplace_cf_closed(params, a, s)))

    checks = {
        "series_vs_series": {"max_abs_diff": worst_series, "threshold": cfg.series_threshold},
        "series_vs_mc": {"max_sigma": worst_z, "threshold": cfg.gate()},
        "laplace_roundtrip": {"max_abs_diff": worst_laplace, "threshold": cfg.laplace_threshold},
    }
    for check in checks.values():
        value = check.get("max_abs_diff", check.get("max_sigma"))
        check["ok"] = value <= check["threshold"]
    return {
        "checks": checks,
        "samples": cfg.samples,
        "seed": cfg.seed,
        "inject_fault": cfg.inject_fault,
        "ok": all(c["ok"] for c in checks.values()),
    }


def cmd_compare(args) -> int:
    cfg = CompareConfig(
        samples=args.samples,
        seed=args.seed,
        workers=args.workers or default_workers(),
        tol=args.tol,
        inject_fault=args.inject_fault,
        sigma_gate=args.sigma_gate,
    )
    report = compare(cfg)
    _emit(_dump_json(report), args.output)
    return 0 if report["ok"] else 1


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="markovflight",
        description="Characteristic function, Laplace checks, Monte Carlo and moments "
        "of the isotropic Markov random flight.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def flight(p, need_c=True):
        p.add_argument("--m", type=int, required=True, help="dimension (>= 3)")
        p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="switching rate")
        if need_c:
            p.add_argument("--c", type=float, default=1.0, help="speed")
        p.add_argument("-o", "--output", help="write the report to this file")

    p = sub.add_parser("coeffs", help="exact series coefficient as JSON")
    p.add_argument("--kind", choices=[k.value for k in Kind], required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--method", choices=["recurrence", "determinant", "split"], default="recurrence")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("eval", help="evaluate H by both series")
    flight(p)
    p.add_argument("--a", type=float, nargs="+", required=True, help="|alpha| value(s)")
    p.add_argument("--t", type=float, nargs="+", required=True, help="time value(s)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-terms", type=int, default=400)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("laplace-check", help="closed Laplace transform vs quadrature of H")
    flight(p)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-6, help="acceptance threshold")
    p.add_argument("--quad-tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_laplace_check)

    p = sub.add_parser("simulate", help="Monte Carlo estimate")
    flight(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--estimand", choices=["cf", "moment", "no-switch"], default="cf")
    p.add_argument("--a", type=float, default=1.0, help="|alpha| along the first axis")
    p.add_argument("--alpha", type=float, nargs="+", help="full alpha vector")
    p.add_argument("--q", type=int, nargs="+", help="moment multi-index (default all twos)")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("moments", help="mixed-moment series")
    flight(p)
    p.add_argument("--q", choices=["ones", "twos"], default="twos")
    p.add_argument("--order", type=int, default=7, help="highest power of t kept")
    p.add_argument("--t", type=float, default=None, help="evaluate at this time")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("compare", help="full cross-validation grid")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--sigma-gate", type=float, default=None)
    p.add_argument("--inject-fault", action="store_true", help="corrupt gamma_3 (negative control)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits 2
    except ValueError as exc:
        print(f"markovflight: error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ZeroDivisionError) as exc:
        print(f"markovflight: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
