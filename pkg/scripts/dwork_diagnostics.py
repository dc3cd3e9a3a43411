#!/usr/bin/env python3
"""Dump the Dwork engine's internals for one coefficient vector as JSON.

    python3 scripts/dwork_diagnostics.py 11 3 1 1,1,0,1,1 > f11.json
"""
import argparse
import json
import sys

from laurentnp.dwork import diagnostics, gamma_checks, splitting_coeffs
from laurentnp.oracle import LaurentCoeffVector


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("p", type=int)
    ap.add_argument("d", type=int)
    ap.add_argument("e", type=int)
    ap.add_argument("a", help="comma-separated a_-e..a_d")
    ap.add_argument("--K", type=int)
    ap.add_argument("--M", type=int)
    args = ap.parse_args(argv)

    f = LaurentCoeffVector.make(args.p, args.d, args.e, [int(x) for x in args.a.split(",")])
    dump = diagnostics(f, args.K, args.M)
    dump["checks"] = gamma_checks(f, splitting_coeffs(f, dump["M"]), dump["K"])
    json.dump(dump, sys.stdout, indent=1, sort_keys=True)
    print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
