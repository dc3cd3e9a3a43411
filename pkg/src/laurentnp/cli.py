"""Command-line entry point: ``laurentnp <command> [flags]``."""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import campaign as cp
from .dwork import PrecisionError, TruncationError
from .finite_field import DEFAULT_GUARD, SizeGuardError
from .hasse import HasseError, hasse_polynomial
from .oracle import LPolynomialError, newton_polygon, l_polynomial, verify_instance
from .polygons import (
    IntervalShape,
    ThresholdWarning,
    arithmetic_polygon,
    convexity_report,
    hodge_polygon,
    lies_on_or_above,
)


def _common(sub: argparse.ArgumentParser, campaign: bool = False) -> None:
    sub.add_argument("--p", type=int, help="prime")
    sub.add_argument("--d", type=int, help="right endpoint d >= 1")
    sub.add_argument("--e", type=int, help="left endpoint -e, e >= 0")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--config", help="JSON config; flags override its values")
    if campaign:
        sub.add_argument("--b", type=int, help="coefficient field F_{p^b}")
        sub.add_argument("--mode", choices=["exhaustive", "sample", "single"])
        sub.add_argument("--count", type=int)
        sub.add_argument("--seed", type=int)
        sub.add_argument("--a", help="comma-separated a_-e..a_d (single mode)")
        sub.add_argument("--engines", choices=["oracle", "dwork", "both"])
        sub.add_argument("--cache", help="JSON-lines L-polynomial cache")
        sub.add_argument("--guard", type=int, help=f"largest field size enumerated (default {DEFAULT_GUARD})")
        sub.add_argument("--prng", choices=list(cp.PRNGS))
        sub.add_argument("--workers", type=int)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="laurentnp", description=__doc__)
    subs = ap.add_subparsers(dest="command", required=True)
    _common(subs.add_parser("polygon", help="Hodge and arithmetic polygons"))
    _common(subs.add_parser("hasse", help="Hasse polynomial and its components"))
    _common(subs.add_parser("verify", help="run a verification campaign"), campaign=True)
    _common(subs.add_parser("crosscheck", help="oracle vs Dwork engine"), campaign=True)
    _common(subs.add_parser("oracle", help="L-polynomial of one instance"), campaign=True)
    return ap


def _parse_a(text: str | None):
    if text is None:
        return None
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        out.append([int(x) for x in tok.split(":")] if ":" in tok else int(tok))
    return out


def _config(args, **extra) -> cp.ExperimentConfig:
    overrides = {k: getattr(args, k, None) for k in
                 ("p", "d", "e", "b", "mode", "count", "seed", "engines", "out", "cache",
                  "guard", "prng", "workers")}
    overrides["a"] = _parse_a(getattr(args, "a", None))
    if overrides["a"] is not None and overrides["mode"] is None:
        overrides["mode"] = "single"
    overrides.update(extra)
    return cp.ExperimentConfig.load(args.config, **overrides)


def _shape(args) -> tuple[int, IntervalShape]:
    cfg = _config(args, mode="exhaustive", max_instances=10**30)
    return cfg.p, cfg.shape


def _emit(out: str | None, name: str, text: str) -> None:
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        (Path(out) / name).write_text(text)


def cmd_polygon(args) -> int:
    p, shape = _shape(args)
    hodge = hodge_polygon(shape)
    arith = arithmetic_polygon(p, shape)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ThresholdWarning)
        rep = convexity_report(arith, prime=p, shape=shape)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    print(f"hodge       {hodge}")
    print(f"arithmetic  {arith}")
    print(f"vertices    hodge {hodge.vertices}  arithmetic {arith.vertices}")
    diff = [k for k in range(len(hodge) + 1) if arith[k] != hodge[k]]
    print("arithmetic = hodge" if not diff else f"differ at k = {diff}: " +
          ", ".join(f"{arith[k]} vs {hodge[k]}" for k in diff))
    print(f"convex {rep.is_convex}  above hodge {lies_on_or_above(arith, hodge)}"
          + ("" if rep.criterion_ok is None else f"  vertex criterion {rep.criterion_ok}"))
    doc = {"p": p, "d": shape.d, "e": shape.e, "hodge": hodge.to_json(), "arithmetic": arith.to_json(),
           "convex": rep.is_convex, "vertex_criterion": rep.criterion_ok}
    _emit(args.out, "polygons.json", json.dumps(doc, sort_keys=True, indent=1) + "\n")
    _emit(args.out, "hodge.csv", hodge.to_csv())
    _emit(args.out, "arithmetic.csv", arith.to_csv())
    return cp.EXIT_OK


def cmd_hasse(args) -> int:
    p, shape = _shape(args)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ThresholdWarning)
        H = hasse_polynomial(p, shape)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    for k, comp in sorted(H.components.items()):
        print(f"H_{k}  |S_{k}| = {H.sk_sizes[k]}  {comp.pretty()}")
    full = H.expand()
    print(f"H = {full.pretty()}")
    doc = full.to_json()
    doc["components"] = {str(k): c.to_json()["terms"] for k, c in sorted(H.components.items())}
    doc["sk_sizes"] = {str(k): v for k, v in sorted(H.sk_sizes.items())}
    _emit(args.out, "hasse.json", json.dumps(doc, sort_keys=True, indent=1) + "\n")
    return cp.EXIT_OK


def _campaign(args, runner) -> int:
    cfg = _config(args)
    report = runner(cfg)
    c = report.counts
    print(" ".join(f"{k}={v}" for k, v in sorted(c.items())))
    if report.counterexamples:
        shown = report.counterexamples[:10]
        print(f"{len(report.counterexamples)} counterexamples, first {len(shown)}: {shown}")
    if cfg.out:
        print(f"report: {cp.write_report(report, cfg.out, report.kind)}")
    return report.exit_code


def cmd_verify(args) -> int:
    return _campaign(args, cp.run_verify)


def cmd_crosscheck(args) -> int:
    if getattr(args, "engines", None) is None:
        args.engines = "both"
    return _campaign(args, lambda cfg: cp.run_crosscheck(cfg, cfg.out))


def cmd_oracle(args) -> int:
    cfg = _config(args)
    if cfg.mode != "single":
        raise cp.ValidationError("oracle needs --a")
    f = cfg.instance(cfg.a)
    cache = cp.LCache(cfg.cache, cfg.spot_check) if cfg.cache else None
    L = (cache.get(f, cfg.guard) if cache else None) or l_polynomial(f, guard=cfg.guard)
    if cache:
        cache.put_many([(f, L)])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThresholdWarning)
        rep = verify_instance(f, L=L, guard=cfg.guard)
    doc = {"p": cfg.p, "b": cfg.b, "d": cfg.d, "e": cfg.e, "a": f.json_coeffs(), "L": L.to_json(),
           "valuations": [v if v != float("inf") else None for v in L.valuations()],
           "np": newton_polygon(L, cfg.b).to_json(), "report": rep.to_json()}
    if cfg.engines != "oracle":
        poly, K, M = cp._dwork_polygon(f)
        doc["dwork"] = {"K": K, "M": M, "np": poly.to_json(), "identical": poly == rep.newton}
    text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    print(text, end="")
    _emit(cfg.out, "oracle.json", text)
    return cp.EXIT_OK if not rep.counterexample else cp.EXIT_COUNTEREXAMPLE


COMMANDS = {"polygon": cmd_polygon, "hasse": cmd_hasse, "verify": cmd_verify,
            "crosscheck": cmd_crosscheck, "oracle": cmd_oracle}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (cp.ValidationError, cp.CacheError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return cp.EXIT_VALIDATION
    except (cp.BudgetError, SizeGuardError, PrecisionError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return cp.EXIT_BUDGET
    except (HasseError, LPolynomialError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return cp.EXIT_COUNTEREXAMPLE


if __name__ == "__main__":
    sys.exit(main())
