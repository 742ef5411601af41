"""Command-line front end: count, zeta, variety, jacobian, brute.

Every command echoes its parameters and per-phase wall times in a report,
printed as JSON (default) or text.  Exit codes: 0 success, 2 parse or
validation failure, 3 size/enumeration cap exceeded, 4 internal consistency
failure.  With --stable-output the timing block is omitted so identical
invocations print byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .cone import ConeCtx, count_points
from .dwork import matrix_weight_bound, toric_run
from .errors import CapError, ConsistencyError, SizeCapExceeded, ValidationError
from .ffield import make_field, parse_poly
from .oracle import DEFAULT_CAP, brute_affine, brute_toric
from .zeta import (
    CountSeries,
    affine_count_detail,
    default_bounds,
    jacobian_detail,
    recover_zeta,
    variety_count,
)

DEFAULT_SIZE_CAP = 30000

_PHASES = ("theta", "f_series", "build_a", "power", "recovery")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dworkzeta",
        description="Exact point counts and zeta functions over small finite fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--p", type=int, required=True, help="characteristic (prime)")
        sp.add_argument("--a", type=int, default=1, help="base field degree over F_p")
        sp.add_argument("--modulus", help="field modulus c0,c1,...,ca (monic, low to high)")
        sp.add_argument("--n", type=int, required=True, help="number of variables")
        sp.add_argument("--poly", action="append", default=None, help="polynomial (repeatable)")
        sp.add_argument("--k", type=int, default=1, help="extension degree to count over")
        sp.add_argument("--degree-bounds", help="zeta degree bounds D1,D2")
        sp.add_argument("--precision", type=int, default=None, help="override p-adic precision N")
        sp.add_argument("--size-cap", type=int, default=DEFAULT_SIZE_CAP,
                        help=f"refuse matrix dimensions above this (default {DEFAULT_SIZE_CAP})")
        sp.add_argument("--enum-cap", type=int, default=DEFAULT_CAP,
                        help="refuse brute-force enumerations above this many points")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--stable-output", action="store_true",
                        help="omit timings so identical runs print identical reports")
        return sp

    count = common(sub.add_parser("count", help="zeros of one polynomial"))
    count.add_argument("--torus", action="store_true", help="count on the torus, not affine space")

    common(sub.add_parser("zeta", help="rational zeta function from trace-formula counts"))
    common(sub.add_parser("variety", help="common zeros of several polynomials"))

    jac = common(sub.add_parser("jacobian", help="Jacobian group order of an affine curve"))
    jac.add_argument("--oracle", action="store_true",
                     help="take counts from brute force instead of the trace formula")

    brute = common(sub.add_parser("brute", help="brute-force mirror of count/zeta"))
    brute.add_argument("--torus", action="store_true")
    return parser


def _field(args):
    if args.modulus is not None:
        h = [int(c) for c in args.modulus.split(",")]
        return make_field(args.p, args.a, h)
    return make_field(args.p, args.a)


def _polys(args, spec, want_one=True):
    if not args.poly:
        raise ValidationError("at least one --poly is required")
    if want_one and len(args.poly) != 1:
        raise ValidationError("this command takes exactly one --poly")
    return [parse_poly(text, args.n, spec) for text in args.poly]


def _bounds(args, n, d):
    if args.degree_bounds is not None:
        parts = args.degree_bounds.split(",")
        if len(parts) != 2:
            raise ValidationError("--degree-bounds needs the form D1,D2")
        D1, D2 = int(parts[0]), int(parts[1])
        if D1 < 0 or D2 < 0:
            raise ValidationError("degree bounds must be >= 0")
        return D1, D2
    return default_bounds(n, d)


def _refuse_oversized(f, k, spec, size_cap):
    """Refuse up front when the largest needed matrix would blow the cap."""
    N = (f.n + 1) * spec.a * k
    t = matrix_weight_bound(spec.p, N)
    implied = count_points(t, ConeCtx(f.n, f.d))
    if size_cap is not None and implied > size_cap:
        raise SizeCapExceeded(implied, size_cap)


def _merge_timings(report, runs):
    for _, run in runs:
        for phase, dt in run.timings.items():
            if phase in report["timings"]:
                report["timings"][phase] += dt
            else:
                report["timings"][phase] = dt


def _echo_run(report, run):
    report["params"].update(
        N=run.N, t=run.t, t_tilde=run.t_tilde, W=run.W, W_tilde=run.W_tilde
    )


def _base_report(args, spec, d=None, k=None):
    return {
        "command": args.command,
        "params": {
            "p": spec.p,
            "a": spec.a,
            "q": spec.q,
            "modulus": list(spec.h),
            "n": args.n,
            "d": d,
            "k": k,
            "poly": list(args.poly or []),
        },
        "timings": {},
        "warnings": [],
    }


def _cmd_count(args, spec):
    f = _polys(args, spec)[0]
    report = _base_report(args, spec, d=f.d, k=args.k)
    if args.torus:
        run = toric_run(f, args.k, spec, N_opt=args.precision, size_cap=args.size_cap)
        _echo_run(report, run)
        _merge_timings(report, [((), run)])
        if run.exact:
            report["count"] = run.count
        else:
            report["bracket"] = run.bracket
            report["warnings"].append(
                "precision below (n+1)ak: reporting the congruence bracket, not a count"
            )
    else:
        if args.precision is not None:
            raise ValidationError("--precision applies only to --torus counts")
        total, runs = affine_count_detail(f, args.k, spec, size_cap=args.size_cap)
        report["count"] = total
        _merge_timings(report, runs)
        if runs:
            _echo_run(report, runs[0][1])
    return report


def _count_series(f, depth, spec, args, report):
    counts = []
    for k in range(1, depth + 1):
        total, runs = affine_count_detail(f, k, spec, size_cap=args.size_cap)
        counts.append(total)
        _merge_timings(report, runs)
        if k == depth and runs:
            _echo_run(report, runs[0][1])
    return CountSeries(spec.q, tuple(counts))


def _cmd_zeta(args, spec):
    f = _polys(args, spec)[0]
    D1, D2 = _bounds(args, args.n, f.d)
    report = _base_report(args, spec, d=f.d, k=D1 + D2)
    report["params"]["degree_bounds"] = [D1, D2]
    _refuse_oversized(f, D1 + D2, spec, args.size_cap)
    series = _count_series(f, D1 + D2, spec, args, report)
    start = time.perf_counter()
    zf = recover_zeta(series, D1, D2)
    report["timings"]["recovery"] = time.perf_counter() - start
    report["counts"] = list(series.counts)
    report["numerator"] = list(zf.num)
    report["denominator"] = list(zf.den)
    return report


def _cmd_variety(args, spec):
    fs = _polys(args, spec, want_one=False)
    report = _base_report(args, spec, d=max(f.d for f in fs), k=args.k)
    start = time.perf_counter()
    report["count"] = variety_count(fs, args.k, spec, size_cap=args.size_cap)
    report["timings"]["power"] = time.perf_counter() - start
    return report


def _cmd_jacobian(args, spec):
    f = _polys(args, spec)[0]
    D1, D2 = _bounds(args, args.n, f.d)
    depth = D1 + D2
    report = _base_report(args, spec, d=f.d, k=depth)
    report["params"]["degree_bounds"] = [D1, D2]
    if args.oracle:
        counts = tuple(brute_affine(f, k, spec, cap=args.enum_cap) for k in range(1, depth + 1))
        series = CountSeries(spec.q, counts)
    else:
        _refuse_oversized(f, depth, spec, args.size_cap)
        series = _count_series(f, depth, spec, args, report)
    start = time.perf_counter()
    zf = recover_zeta(series, D1, D2)
    P, order = jacobian_detail(zf, spec.q)
    report["timings"]["recovery"] = time.perf_counter() - start
    report["counts"] = list(series.counts)
    report["numerator"] = list(zf.num)
    report["denominator"] = list(zf.den)
    report["p_poly"] = list(P)
    report["order"] = order
    return report


def _cmd_brute(args, spec):
    f = _polys(args, spec)[0]
    if args.degree_bounds is not None:
        D1, D2 = _bounds(args, args.n, f.d)
        report = _base_report(args, spec, d=f.d, k=D1 + D2)
        report["params"]["degree_bounds"] = [D1, D2]
        counter = brute_toric if args.torus else brute_affine
        start = time.perf_counter()
        counts = tuple(counter(f, k, spec, cap=args.enum_cap) for k in range(1, D1 + D2 + 1))
        zf = recover_zeta(CountSeries(spec.q, counts), D1, D2)
        report["timings"]["recovery"] = time.perf_counter() - start
        report["counts"] = list(counts)
        report["numerator"] = list(zf.num)
        report["denominator"] = list(zf.den)
        return report
    report = _base_report(args, spec, d=f.d, k=args.k)
    start = time.perf_counter()
    counter = brute_toric if args.torus else brute_affine
    report["count"] = counter(f, args.k, spec, cap=args.enum_cap)
    report["timings"]["power"] = time.perf_counter() - start
    return report


_COMMANDS = {
    "count": _cmd_count,
    "zeta": _cmd_zeta,
    "variety": _cmd_variety,
    "jacobian": _cmd_jacobian,
    "brute": _cmd_brute,
}


def _render(report, args) -> str:
    total = report.pop("_total", None)
    if args.stable_output:
        report.pop("timings", None)
    else:
        timings = {k: round(v, 6) for k, v in report["timings"].items()}
        timings["total"] = round(total if total is not None else sum(timings.values()), 6)
        report["timings"] = timings
    if args.format == "json":
        return json.dumps(report, sort_keys=True)
    lines = []
    for key, value in sorted(report.items()):
        if isinstance(value, dict):
            for k2, v2 in sorted(value.items()):
                lines.append(f"{key}.{k2}: {v2}")
        elif isinstance(value, list):
            lines.append(f"{key}: {','.join(str(v) for v in value)}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        start = time.perf_counter()
        report = _COMMANDS[args.command](args, _field(args))
        report["_total"] = time.perf_counter() - start
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    print(_render(report, args))
    return 0


if __name__ == "__main__":
    sys.exit(main())
