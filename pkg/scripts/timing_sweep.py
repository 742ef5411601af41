#!/usr/bin/env python3
"""Matrix-size and wall-time sweep for the p-adic trace-formula counter.

Runs one polynomial across a range of extension degrees and prints, per run,
the working precision N, the weight cutoff t, the nuclear-matrix dimension W,
per-phase timings, and the exact torus count.  With --check each count is
verified against the brute-force oracle (feasible only for small q^k).
"""

import argparse
import sys
import time

from dworkzeta.dwork import toric_run
from dworkzeta.ffield import make_field, parse_poly
from dworkzeta.oracle import brute_toric


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=2, help="field characteristic")
    ap.add_argument("--a", type=int, default=1, help="extension degree of the base field")
    ap.add_argument("--n", type=int, default=2, help="number of variables")
    ap.add_argument("--poly", default="x1^3 + x2^2 + x2", help="polynomial text")
    ap.add_argument("--k-max", type=int, default=2, help="largest extension degree to count over")
    ap.add_argument("--precision", type=int, default=None,
                    help="override the default p-adic working precision")
    ap.add_argument("--size-cap", type=int, default=None,
                    help="refuse runs whose matrix dimension would exceed this")
    ap.add_argument("--check", action="store_true",
                    help="cross-check each count against the brute-force oracle")
    args = ap.parse_args(argv)

    spec = make_field(args.p, args.a)
    f = parse_poly(args.poly, args.n, spec)
    print(f"{args.poly}  over F_{spec.q}  (n={args.n}, d={f.d})")
    print(f"{'k':>3} {'N':>4} {'t':>4} {'W':>7} {'theta':>7} {'series':>7} "
          f"{'matrix':>7} {'power':>7} {'count':>10}")
    for k in range(1, args.k_max + 1):
        start = time.perf_counter()
        run = toric_run(f, k, spec, N_opt=args.precision, size_cap=args.size_cap)
        wall = time.perf_counter() - start
        t = run.timings
        line = (f"{k:>3} {run.N:>4} {run.t:>4} {run.W:>7} "
                f"{t['theta']:>7.2f} {t['f_series']:>7.2f} {t['build_a']:>7.2f} "
                f"{t['power']:>7.2f} {run.count:>10}")
        if args.check:
            star = brute_toric(f, k, spec)
            line += "  ok" if run.count == star else f"  MISMATCH oracle={star}"
        print(line + f"   ({wall:.2f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
