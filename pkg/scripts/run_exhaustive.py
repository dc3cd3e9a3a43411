#!/usr/bin/env python3
"""Exhaustive verify campaigns over every nondegenerate vector with a_0 = 1.

    python3 scripts/run_exhaustive.py --out runs/exhaustive
    python3 scripts/run_exhaustive.py --shape 7,2,1 --cache runs/cache.jsonl
"""
import argparse
import sys

from laurentnp.campaign import ExperimentConfig, run_verify, write_report

DEFAULT_SHAPES = ["7,2,1", "11,3,1"]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--shape", action="append", help="p,d,e (repeatable)")
    ap.add_argument("--out", default="runs/exhaustive")
    ap.add_argument("--cache")
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args(argv)

    worst = 0
    for triple in args.shape or DEFAULT_SHAPES:
        p, d, e = (int(x) for x in triple.split(","))
        cfg = ExperimentConfig.load(p=p, d=d, e=e, cache=args.cache, workers=args.workers)
        report = run_verify(cfg)
        path = write_report(report, args.out, f"verify_{p}_{d}_{e}")
        c = report.counts
        print(f"({p},{d},{e}) {c['instances']} vectors, {len(report.counterexamples)} counterexamples "
              f"in {report.timing['total_s']:.1f}s -> {path}")
        for key in ("H_nonzero_generic", "H_nonzero_nongeneric", "H_zero_generic", "H_zero_nongeneric"):
            print(f"    {key:22s} {c[key]}")
        worst = max(worst, report.exit_code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
