"""Verification campaigns: configs, the L-polynomial cache and reports.

A campaign walks a set of coefficient vectors (every nondegenerate vector,
a seeded sample, or a single vector), computes L-polynomials with the exact
oracle and optionally the Dwork engine, and assembles a report whose bytes
depend only on the config.  Wall-clock figures go to a separate file.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np
from filelock import FileLock

from .finite_field import DEFAULT_GUARD, SizeGuardError, build_extension
from .hasse import hasse_polynomial
from .oracle import (
    BatchOracle,
    LaurentCoeffVector,
    LPolynomial,
    l_polynomial,
    newton_polygon,
    verify_instance,
)
from .polygons import IntervalShape, LowerPolygon, is_prime

__all__ = [
    "ExperimentConfig",
    "CampaignReport",
    "LCache",
    "CacheError",
    "ValidationError",
    "BudgetError",
    "EXIT_OK",
    "EXIT_VALIDATION",
    "EXIT_COUNTEREXAMPLE",
    "EXIT_BUDGET",
    "instance_vectors",
    "run_verify",
    "run_crosscheck",
    "write_report",
]

EXIT_OK, EXIT_VALIDATION, EXIT_COUNTEREXAMPLE, EXIT_BUDGET = 0, 2, 3, 4

PRNGS = ("pcg64", "philox", "sfc64", "mt19937")


class ValidationError(ValueError):
    pass


class BudgetError(RuntimeError):
    pass


class CacheError(RuntimeError):
    pass


@dataclass
class ExperimentConfig:
    p: int
    d: int
    e: int = 0
    b: int = 1
    mode: str = "exhaustive"  # exhaustive | sample | single
    count: int | None = None
    seed: int | None = None
    a: list | None = None
    engines: str = "oracle"  # oracle | dwork | both
    out: str | None = None
    cache: str | None = None
    guard: int = DEFAULT_GUARD
    prng: str = "pcg64"
    max_instances: int = 200_000
    spot_check: float = 0.05
    stability: bool = True
    workers: int = 1

    @classmethod
    def load(cls, path: str | Path | None = None, **overrides) -> "ExperimentConfig":
        """Read a JSON config and apply overrides; ``None`` overrides are ignored."""
        data: dict[str, Any] = {}
        if path is not None:
            try:
                data = json.loads(Path(path).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ValidationError(f"cannot read config {path}: {exc}") from exc
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        data.update({k: v for k, v in overrides.items() if v is not None})
        missing = {"p", "d"} - set(data)
        if missing:
            raise ValidationError(f"missing parameters: {sorted(missing)}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @property
    def shape(self) -> IntervalShape:
        return IntervalShape(self.d, self.e)

    def validate(self) -> None:
        if not is_prime(self.p):
            raise ValidationError(f"p = {self.p} is not prime")
        try:
            self.shape.check_prime(self.p)
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
        if self.b < 1:
            raise ValidationError("b must be positive")
        if self.mode not in ("exhaustive", "sample", "single"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.mode == "sample":
            if self.seed is None:
                raise ValidationError("sample mode needs a seed")
            if self.count is None or self.count < 0:
                raise ValidationError("sample mode needs a nonnegative count")
        if self.mode == "single":
            if self.a is None:
                raise ValidationError("single mode needs a coefficient vector")
            try:
                self.instance(self.a)
            except ValueError as exc:
                raise ValidationError(str(exc)) from exc
        if self.engines not in ("oracle", "dwork", "both"):
            raise ValidationError(f"unknown engines {self.engines!r}")
        if self.engines != "oracle" and (self.b != 1 or self.e == 0):
            raise ValidationError("the Dwork engine needs b = 1 and e > 0")
        if self.prng not in PRNGS:
            raise ValidationError(f"prng must be one of {PRNGS}")
        if not 0 <= self.spot_check <= 1:
            raise ValidationError("spot_check is a fraction in [0, 1]")

    def instance(self, a: Sequence) -> LaurentCoeffVector:
        if self.b == 1:
            return LaurentCoeffVector(self.p, self.shape, tuple(int(x) for x in a))
        return LaurentCoeffVector(self.p, self.shape, tuple(tuple(x) for x in a), self.b)

    def to_json(self) -> dict:
        """Fields that determine the report (paths and worker count excluded)."""
        d = dataclasses.asdict(self)
        for k in ("out", "cache", "workers"):
            d.pop(k)
        return d


# coefficient-vector enumeration


def _radices(cfg: ExperimentConfig) -> list[int]:
    """Choices per coefficient slot a_-e..a_d; a_0 is pinned to 1."""
    q = cfg.p**cfg.b
    out = []
    for i in range(-cfg.e, cfg.d + 1):
        if i == 0:
            out.append(1)
        elif i == cfg.d or (cfg.e and i == -cfg.e):
            out.append(q - 1)
        else:
            out.append(q)
    return out


def _decode_index(cfg: ExperimentConfig, n: int, radices: list[int]) -> list:
    F = build_extension(cfg.p, cfg.b)
    digits = []
    for r in reversed(radices):
        n, x = divmod(n, r)
        digits.append(x)
    digits.reverse()
    a = []
    for i, x in zip(range(-cfg.e, cfg.d + 1), digits):
        if i == 0:
            val = 1
        elif i == cfg.d or (cfg.e and i == -cfg.e):
            val = x + 1
        else:
            val = x
        a.append(val if cfg.b == 1 else list(F.decode(val)))
    return a


def space_size(cfg: ExperimentConfig) -> int:
    return math.prod(_radices(cfg))


def _generator(cfg: ExperimentConfig) -> np.random.Generator:
    bitgen = {"pcg64": np.random.PCG64, "philox": np.random.Philox,
              "sfc64": np.random.SFC64, "mt19937": np.random.MT19937}[cfg.prng]
    return np.random.Generator(bitgen(cfg.seed))


def instance_vectors(cfg: ExperimentConfig) -> list[list]:
    """Coefficient vectors of the campaign, sorted; samples are drawn without replacement."""
    radices = _radices(cfg)
    total = math.prod(radices)
    if cfg.mode == "single":
        return [list(cfg.instance(cfg.a).json_coeffs())]
    if cfg.mode == "exhaustive":
        if total > cfg.max_instances:
            raise BudgetError(f"{total} vectors exceed the budget of {cfg.max_instances}")
        idx = range(total)
    else:
        n = min(cfg.count, total)
        if n > cfg.max_instances:
            raise BudgetError(f"{n} samples exceed the budget of {cfg.max_instances}")
        rng = _generator(cfg)
        if total <= 2**62:
            idx = sorted(int(x) for x in rng.choice(total, size=n, replace=False))
        else:
            seen: set[int] = set()
            while len(seen) < n:
                seen.add(int(rng.integers(0, 2**62)) % total)
            idx = sorted(seen)
    return [_decode_index(cfg, i, radices) for i in idx]


# cache


def _key(p: int, b: int, d: int, e: int, a: list) -> str:
    return json.dumps([p, b, d, e, a], separators=(",", ":"))


class LCache:
    """Append-only JSON-lines store of L-polynomials keyed by (p, b, d, e, a).

    Hits are spot-checked: a deterministic fraction of them (chosen by hashing
    the key) is recomputed and must agree exactly.
    """

    def __init__(self, path: str | Path, spot_check: float = 0.05):
        self.path = Path(path)
        self.lock = FileLock(str(self.path) + ".lock")
        self.spot_check = spot_check
        self.records: dict[str, dict] = {}
        self.hits = self.misses = self.checked = 0
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        with self.lock:
            lines = self.path.read_text().splitlines()
        for n, line in enumerate(lines, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                key = _key(rec["p"], rec["b"], rec["d"], rec["e"], rec["a"])
                rec["L"], rec["np"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CacheError(f"{self.path}:{n}: corrupt record ({exc})") from exc
            self.records[key] = rec

    def _should_check(self, key: str) -> bool:
        h = int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "big")
        return h < self.spot_check * 2**64

    def get(self, f: LaurentCoeffVector, guard: int = DEFAULT_GUARD) -> LPolynomial | None:
        key = _key(*f.key)
        rec = self.records.get(key)
        if rec is None:
            self.misses += 1
            return None
        self.hits += 1
        L = LPolynomial.from_json(f.p, rec["L"])
        if self._should_check(key):
            self.checked += 1
            fresh = l_polynomial(f, guard=guard)
            if fresh.to_json() != rec["L"]:
                raise CacheError(f"cached L for {key} disagrees with recomputation")
        return L

    def put_many(self, items: Iterable[tuple[LaurentCoeffVector, LPolynomial]]) -> None:
        lines = []
        for f, L in items:
            key = _key(*f.key)
            if key in self.records:
                continue
            p, b, d, e, a = f.key
            rec = {"p": p, "b": b, "d": d, "e": e, "a": a, "L": L.to_json(),
                   "np": newton_polygon(L, b).to_json()}
            self.records[key] = rec
            lines.append(json.dumps(rec, sort_keys=True, separators=(",", ":")))
        if lines:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.lock, self.path.open("a") as fh:
                fh.write("\n".join(lines) + "\n")


# reports


@dataclass
class CampaignReport:
    kind: str
    config: dict
    records: list[dict] = field(default_factory=list)
    counts: dict[str, int] = field(default_factory=dict)
    counterexamples: list = field(default_factory=list)
    timing: dict[str, float] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.ok else EXIT_COUNTEREXAMPLE

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "config": self.config,
            "counts": self.counts,
            "counterexamples": self.counterexamples,
            "records": self.records,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1) + "\n"


def write_report(report: CampaignReport, out: str | Path, name: str = "report") -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.json"
    path.write_text(report.dumps())
    (out / f"{name}.timing.json").write_text(json.dumps(report.timing, sort_keys=True, indent=1) + "\n")
    return path


# oracle work


def _oracle_chunk(args) -> list[list]:
    p, d, e, checks, guard, vectors = args
    batch = BatchOracle(p, IntervalShape(d, e), checks=checks, guard=guard)
    return [L.to_json() for L in batch.l_polynomials(np.array(vectors, dtype=np.int64))]


def _compute_l(cfg: ExperimentConfig, fs: list[LaurentCoeffVector], cache: LCache | None) -> list[LPolynomial]:
    out: list[LPolynomial | None] = [None] * len(fs)
    todo = []
    for n, f in enumerate(fs):
        L = cache.get(f, cfg.guard) if cache else None
        if L is None:
            todo.append(n)
        else:
            out[n] = L
    if todo and cfg.b == 1 and len(todo) > 1:
        vecs = [list(fs[n].coeffs) for n in todo]
        size = max(1, -(-len(vecs) // max(1, cfg.workers)))
        jobs = [(cfg.p, cfg.d, cfg.e, 2, cfg.guard, vecs[i : i + size]) for i in range(0, len(vecs), size)]
        if cfg.workers > 1:
            with ProcessPoolExecutor(cfg.workers) as pool:
                rows = [r for chunk in pool.map(_oracle_chunk, jobs) for r in chunk]
        else:
            rows = [r for job in jobs for r in _oracle_chunk(job)]
        for n, r in zip(todo, rows):
            out[n] = LPolynomial.from_json(cfg.p, r)
    else:
        for n in todo:
            out[n] = l_polynomial(fs[n], guard=cfg.guard)
    if cache is not None:
        cache.put_many((fs[n], out[n]) for n in todo)
    return out  # type: ignore[return-value]


def _dwork_polygon(f: LaurentCoeffVector, escalations: int = 3) -> tuple[LowerPolygon, int, int]:
    """Dwork polygon at the default budget, raising M by 2 on precision failure."""
    from .dwork import PrecisionError, default_budget, l_from_fredholm, min_truncation

    K, M = default_budget(f.shape)
    for _ in range(escalations + 1):
        K = max(K, min_truncation(f.shape, M))
        try:
            return l_from_fredholm(f, K, M), K, M
        except PrecisionError:
            M += 2
    raise BudgetError(f"Dwork precision escalation failed for a = {f.json_coeffs()}")


def _hv_json(hv):
    if hv is None or isinstance(hv, int):
        return hv
    return list(hv)


def run_verify(cfg: ExperimentConfig) -> CampaignReport:
    """Hodge bound, Hasse criterion and Stickelberger checks over the campaign."""
    t0 = time.perf_counter()
    try:
        vectors = instance_vectors(cfg)
        fs = [cfg.instance(a) for a in vectors]
        cache = LCache(cfg.cache, cfg.spot_check) if cfg.cache else None
        Ls = _compute_l(cfg, fs, cache)
    except SizeGuardError as exc:
        raise BudgetError(str(exc)) from exc
    t1 = time.perf_counter()
    H = None
    if cfg.e > 0 and cfg.p >= 3 * cfg.shape.D:
        H = hasse_polynomial(cfg.p, cfg.shape)
    counts = {k: 0 for k in ("instances", "hodge_violations", "np_arithmetic",
                             "H_nonzero_generic", "H_nonzero_nongeneric", "H_zero_generic",
                             "H_zero_nongeneric", "hasse_unchecked", "stickelberger_fail",
                             "dwork_mismatch")}
    records, bad = [], []
    for f, L in zip(fs, Ls):
        rep = verify_instance(f, L=L, H=H, guard=cfg.guard)
        rec = rep.to_json()
        rec["H"] = _hv_json(rep.hasse_value)
        counts["instances"] += 1
        counts["hodge_violations"] += not rep.hodge_bound_ok
        counts["np_arithmetic"] += rep.np_is_arithmetic
        counts["stickelberger_fail"] += rep.stickelberger_ok is False
        if rep.generic_match is None:
            counts["hasse_unchecked"] += 1
        else:
            nz = "nonzero" if rep.np_is_arithmetic == rep.generic_match else "zero"
            gen = "generic" if rep.np_is_arithmetic else "nongeneric"
            counts[f"H_{nz}_{gen}"] += 1
        cex = rep.counterexample
        if cfg.engines != "oracle":
            poly, _, _ = _dwork_polygon(f)
            rec["dwork_match"] = poly == rep.newton
            counts["dwork_mismatch"] += not rec["dwork_match"]
            cex = cex or not rec["dwork_match"]
        records.append(rec)
        if cex:
            bad.append(rec["a"])
    counts["threshold_met"] = int(cfg.p >= 3 * cfg.shape.D)
    report = CampaignReport("verify", cfg.to_json(), records, counts, bad)
    report.timing = {"l_polynomials_s": t1 - t0, "verify_s": time.perf_counter() - t1,
                     "total_s": time.perf_counter() - t0}
    if cache is not None:
        report.timing.update(cache_hits=cache.hits, cache_misses=cache.misses, cache_checked=cache.checked)
    return report


def run_crosscheck(cfg: ExperimentConfig, dump_dir: str | Path | None = None) -> CampaignReport:
    """Oracle and Dwork polygons per instance, with the gamma and matrix diagnostics."""
    from .dwork import (
        PrecisionError,
        diagnostics,
        fredholm_series,
        gamma_checks,
        l_from_fredholm,
        matrix_floor_violations,
        series_floor_violations,
        splitting_coeffs,
    )

    if cfg.b != 1 or cfg.e == 0:
        raise ValidationError("crosscheck needs b = 1 and e > 0")
    t0 = time.perf_counter()
    try:
        fs = [cfg.instance(a) for a in instance_vectors(cfg)]
        cache = LCache(cfg.cache, cfg.spot_check) if cfg.cache else None
        Ls = _compute_l(cfg, fs, cache)
    except SizeGuardError as exc:
        raise BudgetError(str(exc)) from exc
    counts = {k: 0 for k in ("instances", "identical", "floor_violations", "single_leading_violations",
                             "full_leading_violations", "matrix_floor_violations",
                             "series_floor_violations", "unstable")}
    records, bad = [], []
    for f, L in zip(fs, Ls):
        onp = newton_polygon(L)
        dnp, K, M = _dwork_polygon(f)
        gam = splitting_coeffs(f, M)
        g = gamma_checks(f, gam, K)
        mat = matrix_floor_violations(f, gam, K)
        ser = series_floor_violations(f, fredholm_series(f, K, M))
        rec = {"a": f.json_coeffs(), "K": K, "M": M, "oracle_np": onp.to_json(), "dwork_np": dnp.to_json(),
               "identical": onp == dnp, "gamma": g, "matrix_floor": len(mat), "series_floor": ser}
        if cfg.stability:
            try:
                stable = (l_from_fredholm(f, 2 * K, M) == dnp) and (l_from_fredholm(f, 2 * K, M + 2) == dnp)
            except PrecisionError:
                stable = False
            rec["stable"] = stable
            counts["unstable"] += not stable
        counts["instances"] += 1
        counts["identical"] += rec["identical"]
        counts["floor_violations"] += bool(g["floor"])
        counts["single_leading_violations"] += bool(g["single_leading"])
        counts["full_leading_violations"] += bool(g["full_leading"])
        counts["matrix_floor_violations"] += bool(mat)
        counts["series_floor_violations"] += bool(ser)
        records.append(rec)
        if not rec["identical"] or not rec.get("stable", True):
            bad.append(rec["a"])
            if dump_dir is not None:
                path = Path(dump_dir)
                path.mkdir(parents=True, exist_ok=True)
                name = "mismatch_" + "_".join(map(str, f.json_coeffs())) + ".json"
                (path / name).write_text(json.dumps(diagnostics(f, K, M), sort_keys=True) + "\n")
    report = CampaignReport("crosscheck", cfg.to_json(), records, counts, bad)
    report.timing = {"total_s": time.perf_counter() - t0}
    return report
