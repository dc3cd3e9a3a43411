#!/usr/bin/env python3
"""Gap between arithmetic and Hodge polygons as p grows, written as CSV.

    python3 scripts/convergence_sweep.py --d 3 --e 1 --pmax 97 > gap.csv
"""
import argparse
import csv
import sys
from fractions import Fraction

from laurentnp.polygons import IntervalShape, arithmetic_polygon, hodge_polygon, is_prime


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--e", type=int, default=1)
    ap.add_argument("--pmin", type=int, default=5)
    ap.add_argument("--pmax", type=int, default=97)
    args = ap.parse_args(argv)

    shape = IntervalShape(args.d, args.e)
    n = args.d + args.e
    w = csv.writer(sys.stdout)
    w.writerow(["p", "p_mod_D", "max_gap", "max_gap_decimal", "gap_times_p_minus_1", "worst_k"])
    for p in range(args.pmin, args.pmax + 1):
        if not is_prime(p) or shape.D % p == 0:
            continue
        a, h = arithmetic_polygon(p, shape), hodge_polygon(shape)
        gaps = [a[k] - h[k] for k in range(n + 1)]
        gap = max(gaps)
        w.writerow([p, p % shape.D, gap, f"{float(gap):.6f}", gap * (p - 1), gaps.index(gap)])
    return 0


if __name__ == "__main__":
    sys.exit(main())
