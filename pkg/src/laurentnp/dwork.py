"""Newton polygons from Dwork's trace formula, for f over F_p (q = p).

The Frobenius is the operator g -> psi_p(E_a g) on Laurent series, with
psi_p(sum c_i x^i) = sum c_{pi} x^i and E_a = prod_j E(pi * teich(a_j) x^j)
the splitting function.  On the basis x^j its matrix has entries
A[i, j] = gamma_{p i - j}.  Over the full space (no quotient by the
derivation) the one-variable trace formula reads

    S(k, f) = (p^k - 1) Tr(A^k),   so   L(t) = det(1 - tA) / det(1 - ptA).

The determinant is truncated to indices |i| <= K.  Conjugating by the
diagonal pi^deg(i) shows row i of the matrix has valuation at least
(p-1) deg(i), which certifies the truncation once (K+1)/max(d, e) >= M.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement

import numpy as np

from .hasse import lambda_mod
from .oracle import LaurentCoeffVector
from .padic import (
    PadicCyclotomic,
    Valuation,
    cyc_matmul,
    cyc_mul,
    reduce_power_basis,
    valuation_of_coords,
    work_dtype,
)
from .polygons import IntervalShape, LowerPolygon, degree, lower_convex_hull

__all__ = [
    "PrecisionError",
    "TruncationError",
    "dwork_pi",
    "log_relation_residual",
    "teichmuller",
    "SplittingCoefficients",
    "splitting_coeffs",
    "nuclear_matrix",
    "CharSeries",
    "fredholm_series",
    "DworkResult",
    "l_from_fredholm",
    "default_budget",
    "leading_term_single",
    "leading_term_full",
    "gamma_checks",
    "matrix_floor_violations",
    "series_floor_violations",
    "diagnostics",
    "min_truncation",
]


class PrecisionError(ArithmeticError):
    """A polygon decision depends on digits beyond the working precision."""


class TruncationError(ValueError):
    """The matrix truncation K is too small for the requested precision."""


def default_budget(shape: IntervalShape) -> tuple[int, int]:
    """(K, M) = (D(d+e+2), ceil((d+e)/2) + 3)."""
    n = shape.d + shape.e
    return shape.D * (n + 2), -(-n // 2) + 3


def min_truncation(shape: IntervalShape, M: int) -> int:
    return M * max(shape.d, shape.e) - 1


def _artin_hasse_eval(x: PadicCyclotomic) -> PadicCyclotomic:
    p, M = x.p, x.M
    N = M * (p - 1) + 1  # x^n vanishes mod p^M once n >= M(p-1) when ord(x) >= 1/(p-1)
    mod = p**M
    acc = PadicCyclotomic.from_int(p, M, lambda_mod(p, N, mod))
    for n in range(N - 1, -1, -1):
        acc = acc * x + lambda_mod(p, n, mod)
    return acc


def _artin_hasse_derivative(x: PadicCyclotomic) -> PadicCyclotomic:
    p, M = x.p, x.M
    N = M * (p - 1) + 1
    mod = p**M
    acc = PadicCyclotomic.from_int(p, M, N * lambda_mod(p, N, mod))
    for n in range(N - 1, 0, -1):
        acc = acc * x + n * lambda_mod(p, n, mod)
    return acc


@lru_cache(maxsize=32)
def dwork_pi(p: int, M: int) -> PadicCyclotomic:
    """The root of E(x) = zeta_p in the maximal ideal, to precision p^M.

    E(x) - zeta has integral coefficients and a unit derivative on the
    maximal ideal, so Newton's method from zeta - 1 converges to its unique
    root there; that root also satisfies sum_i x^(p^i)/p^i = 0.
    """
    if M < 2:
        raise ValueError("precision must be at least 2 digits")
    zeta = PadicCyclotomic.zeta(p, M)
    x = zeta - 1
    for _ in range(4 * M * p):
        step = (_artin_hasse_eval(x) - zeta) * _artin_hasse_derivative(x).inverse()
        if step == 0:
            return x
        x = x - step
    raise ArithmeticError(f"Newton iteration for pi did not converge at M = {M}")


def log_relation_residual(p: int, M: int) -> Valuation:
    """Valuation of sum_{i} pi^(p^i)/p^i, computed with enough guard digits."""
    imax = 0
    while Fraction(p ** (imax + 1), p - 1) - (imax + 1) < M:
        imax += 1
    Mw = M + imax + 1
    pi = dwork_pi(p, Mw)
    total = PadicCyclotomic.from_int(p, M, 0)
    for i in range(imax + 1):
        term = (pi ** (p**i)).exact_div_p(i)
        total = total + term.with_precision(M)
    return total.valuation()


def teichmuller(a: int, p: int, M: int) -> int:
    """The (p-1)-th root of unity (or 0) in Z_p congruent to a, mod p^M."""
    mod = p**M
    x = a % p
    for _ in range(M):
        x = pow(x, p, mod)
    return x


@dataclass
class SplittingCoefficients:
    """gamma_i for lo <= i <= hi as a (hi - lo + 1, p) cyclic array mod p^M."""

    p: int
    M: int
    lo: int
    hi: int
    table: np.ndarray

    def __getitem__(self, i: int) -> np.ndarray:
        if i < self.lo or i > self.hi:
            return np.zeros(self.p, dtype=self.table.dtype)
        return self.table[i - self.lo]

    def element(self, i: int) -> PadicCyclotomic:
        return PadicCyclotomic(self.p, self.M, list(self[i]))

    def valuation(self, i: int) -> Valuation:
        return valuation_of_coords(reduce_power_basis(self[i], self.p**self.M), self.p, self.M)

    def window(self, K: int) -> dict[int, PadicCyclotomic]:
        return {i: self.element(i) for i in range(-K, K + 1)}


def _require_prime_field(f: LaurentCoeffVector) -> None:
    if f.b != 1:
        raise ValueError("the Dwork engine handles q = p only (b = 1)")


def splitting_coeffs(f: LaurentCoeffVector, M: int) -> SplittingCoefficients:
    """All gamma_i of E_a(x) = prod_j E(pi a_j^ x^j) that are nonzero mod p^M."""
    _require_prime_field(f)
    p, d, e = f.p, f.shape.d, f.shape.e
    mod = p**M
    nmax = M * (p - 1)  # pi^n = 0 mod p^M for n >= nmax
    lo, hi = -e * (nmax - 1), d * (nmax - 1)
    dt = work_dtype(p, M)
    pi = dwork_pi(p, M)
    pi_pows = [PadicCyclotomic.from_int(p, M, 1)]
    for _ in range(nmax - 1):
        pi_pows.append(pi_pows[-1] * pi)
    table = np.zeros((hi - lo + 1, p), dtype=dt)
    table[-lo, 0] = 1
    for j, a in f.items():
        if a == 0:
            continue
        ahat = teichmuller(a, p, M)
        new = np.zeros_like(table)
        for n in range(nmax):
            c = pi_pows[n] * (lambda_mod(p, n, mod) * pow(ahat, n, mod) % mod)
            if not c.v.any():
                continue
            shift = j * n
            src = table[max(0, -shift) : table.shape[0] - max(0, shift)]
            if len(src):
                new[max(0, shift) : max(0, shift) + len(src)] += cyc_mul(src, c.v, mod)
                new %= mod
        table = new
    return SplittingCoefficients(p, M, lo, hi, table)


def nuclear_matrix(gammas: SplittingCoefficients, K: int) -> np.ndarray:
    """A[i, j] = gamma_{p i - j} for i, j in [-K, K]; shape (2K+1, 2K+1, p)."""
    p = gammas.p
    idx = np.arange(-K, K + 1)
    flat = p * idx[:, None] - idx[None, :] - gammas.lo
    inside = (flat >= 0) & (flat < gammas.table.shape[0])
    out = np.zeros((2 * K + 1, 2 * K + 1, p), dtype=gammas.table.dtype)
    out[inside] = gammas.table[flat[inside]]
    return out


@dataclass
class CharSeries:
    """Coefficients of det(1 - tA) mod p^M in power-basis coordinates."""

    p: int
    M: int
    coeffs: list[list[int]]
    traces: list[list[int]]
    K: int

    def valuations(self) -> list[Valuation]:
        return [valuation_of_coords(c, self.p, self.M) for c in self.coeffs]

    def element(self, k: int) -> PadicCyclotomic:
        return PadicCyclotomic(self.p, self.M, self.coeffs[k] + [0])


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def fredholm_series(
    f: LaurentCoeffVector,
    K: int | None = None,
    M: int | None = None,
    degree_bound: int | None = None,
    *,
    self_test: bool = False,
) -> CharSeries:
    """det(1 - tA_K) up to t^degree_bound (default d+e+2), certified mod p^M."""
    _require_prime_field(f)
    shape, p = f.shape, f.p
    if shape.e == 0:
        raise ValueError("the Dwork engine is set up for the torus (e > 0)")
    K0, M0 = default_budget(shape)
    K = K0 if K is None else K
    M = M0 if M is None else M
    top = shape.d + shape.e + 2 if degree_bound is None else degree_bound
    if K < min_truncation(shape, M):
        raise TruncationError(
            f"K = {K} cannot certify {M} digits; need K >= {min_truncation(shape, M)}"
        )
    guard = sum(_vp(k, p) for k in range(1, top + 1))
    Mw = M + guard
    mod = p**Mw
    gam = splitting_coeffs(f, Mw)
    A = nuclear_matrix(gam, K).astype(work_dtype(p, Mw, 2 * K + 1))
    traces = []
    power = A
    for k in range(1, top + 1):
        if k > 1:
            power = cyc_matmul(power, A, mod)
        tr = power.diagonal(axis1=0, axis2=1).sum(axis=-1) % mod
        traces.append(PadicCyclotomic(p, Mw, [int(x) for x in tr]))
    # k C_k = -sum_{i=1..k} T_i C_{k-i}
    C = [PadicCyclotomic.from_int(p, Mw, 1)]
    for k in range(1, top + 1):
        acc = PadicCyclotomic.from_int(p, Mw, 0)
        for i in range(1, k + 1):
            acc = acc - traces[i - 1] * C[k - i]
        v = _vp(k, p)
        unit_inv = pow(k // p**v, -1, mod)
        if v:
            acc = acc.exact_div_p(v).with_precision(Mw)
        C.append(acc * unit_inv)
    out = CharSeries(
        p,
        M,
        [reduce_power_basis(c.v, p**M) for c in C],
        [reduce_power_basis(t.v, p**M) for t in traces],
        K,
    )
    if self_test:
        wide = fredholm_series(f, 2 * K, M, top)
        if out.valuations() != wide.valuations():
            raise PrecisionError(f"coefficient valuations moved when K went {K} -> {2 * K}")
    return out


@dataclass
class DworkResult:
    polygon: LowerPolygon
    valuations: list[Valuation]
    series: CharSeries
    l_coeffs: list[list[int]] = field(default_factory=list)
    overshoot: list[Valuation] = field(default_factory=list)


def l_from_fredholm(
    f: LaurentCoeffVector, K: int | None = None, M: int | None = None, *, details: bool = False
):
    """q-adic Newton polygon of L(t) = det(1 - tA)/det(1 - ptA)."""
    shape, p = f.shape, f.p
    if shape.e == 0:
        raise ValueError("the Dwork engine is set up for the torus (e > 0)")
    n = shape.d + shape.e
    series = fredholm_series(f, K, M, n + 2)
    M = series.M
    C = [series.element(k) for k in range(n + 3)]
    L = []
    for k in range(n + 3):
        acc = C[k]
        for j in range(1, k + 1):
            acc = acc - C[j] * L[k - j] * p**j
        L.append(acc)
    vals = [x.valuation() for x in L]
    scale = p - 1
    exact = [(k, Fraction(v.value, scale)) for k, v in enumerate(vals[: n + 1]) if v.exact]
    if not vals[n].exact:
        raise PrecisionError(f"leading coefficient is 0 mod p^{M}; raise M")
    hull = lower_convex_hull(exact)
    for k, v in enumerate(vals[: n + 1]):
        if not v.exact and Fraction(v.value, scale) < hull[k]:
            raise PrecisionError(f"coefficient {k} is 0 mod p^{M} below the hull; raise M")
    result = DworkResult(hull, vals[: n + 1], series, [x.coords() for x in L[: n + 1]], vals[n + 1 :])
    return result if details else hull


def leading_term_single(f: LaurentCoeffVector, i: int, M: int) -> PadicCyclotomic:
    """pi^w lam_{floor} lam_{ceil frac} a_top^floor a_{rem}, the single-partition leading term."""
    p, shape = f.p, f.shape
    mod = p**M
    size, top = (shape.d, shape.d) if i >= 0 else (shape.e, -shape.e)
    mag = abs(i)
    w = -(-mag // size)
    fl, rem = divmod(mag, size)
    rem_sub = rem if i >= 0 else -rem
    coef = lambda_mod(p, fl, mod) * lambda_mod(p, 1 if rem else 0, mod)
    coef *= pow(teichmuller(f[top], p, M), fl, mod) * teichmuller(f[rem_sub], p, M)
    return dwork_pi(p, M) ** w * (coef % mod)


def leading_term_full(f: LaurentCoeffVector, i: int, M: int) -> PadicCyclotomic:
    """pi^w times the sum over every way to write i with w exponents from one side."""
    p, shape = f.p, f.shape
    mod = p**M
    size = shape.d if i >= 0 else shape.e
    sign = 1 if i >= 0 else -1
    mag = abs(i)
    w = -(-mag // size)
    total = 0
    for parts in combinations_with_replacement(range(1, size + 1), w):
        if sum(parts) != mag:
            continue
        term = 1
        for j in set(parts):
            cnt = parts.count(j)
            term = term * lambda_mod(p, cnt, mod) * pow(teichmuller(f[sign * j], p, M), cnt, mod)
        total = (total + term) % mod
    if w == 0:
        total = 1
    return dwork_pi(p, M) ** w * total


def gamma_checks(f: LaurentCoeffVector, gam: SplittingCoefficients, K: int) -> dict[str, list[int]]:
    """Indices |i| <= K below the ceil(deg(i)) floor or off either leading-term form.

    Floors and leading terms are measured in pi-units; an entry that is 0
    mod p^M counts as meeting any floor up to M(p-1).
    """
    p, M, shape = f.p, gam.M, f.shape
    cap = M * (p - 1)
    bad = {"floor": [], "single_leading": [], "full_leading": []}
    for i in range(-K, K + 1):
        w = math.ceil(degree(i, shape))
        g = gam.element(i)
        if min(g.valuation().value, cap) < min(w, cap):
            bad["floor"].append(i)
        need = min(w + 1, cap)
        if min((g - leading_term_single(f, i, M)).valuation().value, cap) < need:
            bad["single_leading"].append(i)
        if min((g - leading_term_full(f, i, M)).valuation().value, cap) < need:
            bad["full_leading"].append(i)
    return bad


def matrix_floor_violations(f: LaurentCoeffVector, gam: SplittingCoefficients, K: int) -> list[tuple[int, int]]:
    """Entries of the truncated matrix below ceil(deg(p i - j))."""
    p, shape, M = f.p, f.shape, gam.M
    cap = M * (p - 1)
    out = []
    for i in range(-K, K + 1):
        for j in range(-K, K + 1):
            w = math.ceil(degree(p * i - j, shape))
            if min(gam.valuation(p * i - j).value, cap) < min(w, cap):
                out.append((i, j))
    return out


def row_floor_sums(shape: IntervalShape, p: int, K: int, top: int) -> list[Fraction]:
    """Sum of the j smallest row floors (p-1) deg(i), |i| <= K, for j = 0..top."""
    floors = sorted((p - 1) * degree(i, shape) for i in range(-K, K + 1))
    out = [Fraction(0)]
    for x in floors[:top]:
        out.append(out[-1] + x)
    return out


def series_floor_violations(f: LaurentCoeffVector, series: CharSeries) -> list[int]:
    """Degrees j whose det(1 - tA) coefficient falls below the row-floor sum."""
    p, cap = f.p, series.M * (f.p - 1)
    bound = row_floor_sums(f.shape, p, series.K, len(series.coeffs) - 1)
    return [
        j
        for j, v in enumerate(series.valuations())
        if min(v.value, cap) < min(math.ceil(bound[j]), cap)
    ]


def diagnostics(f: LaurentCoeffVector, K: int | None = None, M: int | None = None) -> dict:
    """JSON-ready dump: gamma table, matrix valuation heat map, series valuations."""
    K0, M0 = default_budget(f.shape)
    K = K0 if K is None else K
    M = M0 if M is None else M
    gam = splitting_coeffs(f, M)
    res = l_from_fredholm(f, K, M, details=True)
    heat = [[gam.valuation(f.p * i - j).value for j in range(-K, K + 1)] for i in range(-K, K + 1)]
    return {
        "p": f.p,
        "d": f.shape.d,
        "e": f.shape.e,
        "a": f.json_coeffs(),
        "K": K,
        "M": M,
        "gamma": [
            {"i": i, "coords": reduce_power_basis(gam[i], f.p**M), "val": gam.valuation(i).value,
             "exact": gam.valuation(i).exact}
            for i in range(-K, K + 1)
        ],
        "matrix_valuations": heat,
        "series": [
            {"k": k, "coords": c, "val": v.value, "exact": v.exact}
            for k, (c, v) in enumerate(zip(res.series.coeffs, res.series.valuations()))
        ],
        "l_valuations": [{"k": k, "val": v.value, "exact": v.exact} for k, v in enumerate(res.valuations)],
        "polygon": res.polygon.to_json(),
    }
