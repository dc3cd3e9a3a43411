"""Exact exponential sums, L-polynomials and their Newton polygons.

The additive character is pinned to psi(1) = zeta_p, the second power-basis
vector of Z[zeta_p].  Sums are assembled from residue counts: for every
point x the value Tr(f(x)) in F_p is computed, the counts c_r of each
residue r are tallied, and S = sum_r c_r zeta^r exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .cyclotomic import CyclotomicInteger, InexactDivision
from .finite_field import DEFAULT_GUARD, ExtensionField, SizeGuardError, build_extension
from .hasse import HassePolynomial, hasse_polynomial
from .polygons import (
    IntervalShape,
    LowerPolygon,
    arithmetic_polygon,
    hodge_polygon,
    lies_on_or_above,
    lower_convex_hull,
)

__all__ = [
    "LaurentCoeffVector",
    "LPolynomial",
    "LPolynomialError",
    "InstanceReport",
    "BatchOracle",
    "absolute_trace",
    "char_sum",
    "residue_counts",
    "l_polynomial",
    "l_from_power_sums",
    "pi_adic_valuation",
    "newton_polygon",
    "verify_instance",
    "curve_identity_check",
    "a0_independence_check",
    "galois_consistency_check",
    "nondegenerate_vectors",
]


class LPolynomialError(ArithmeticError):
    """Power sums did not come from a polynomial of the expected degree."""


@dataclass(frozen=True)
class LaurentCoeffVector:
    """f = sum_{i=-e..d} a_i x^i with coefficients in F_{p^b}.

    ``coeffs`` lists a_{-e}, ..., a_d.  For b = 1 entries are ints in
    [0, p); for b > 1 they are coordinate tuples over the degree-b field
    returned by :func:`build_extension`.
    """

    p: int
    shape: IntervalShape
    coeffs: tuple
    b: int = 1

    def __post_init__(self):
        self.shape.check_prime(self.p)
        n = self.shape.d + self.shape.e + 1
        if len(self.coeffs) != n:
            raise ValueError(f"need {n} coefficients a_-e..a_d, got {len(self.coeffs)}")
        base = self.base_field
        coeffs = tuple(
            int(a) % self.p if self.b == 1 else base.coerce(a) for a in self.coeffs
        )
        object.__setattr__(self, "coeffs", coeffs)
        if self.is_zero(self[self.shape.d]):
            raise ValueError("a_d must be nonzero")
        if self.shape.e and self.is_zero(self[-self.shape.e]):
            raise ValueError("a_-e must be nonzero")

    @classmethod
    def make(cls, p: int, d: int, e: int, a: Sequence, b: int = 1) -> "LaurentCoeffVector":
        return cls(p, IntervalShape(d, e), tuple(a), b)

    @classmethod
    def from_free(cls, p: int, shape: IntervalShape, free: Sequence, b: int = 1, a0=1):
        """Build from the coefficients other than a_0, which is set to ``a0``."""
        a = list(free)
        a.insert(shape.e, a0)
        return cls(p, shape, tuple(a), b)

    @property
    def base_field(self) -> ExtensionField:
        return build_extension(self.p, self.b)

    @staticmethod
    def is_zero(a) -> bool:
        return (a == 0) if isinstance(a, int) else not any(a)

    def __getitem__(self, i: int):
        return self.coeffs[i + self.shape.e]

    def items(self):
        return [(i - self.shape.e, a) for i, a in enumerate(self.coeffs)]

    def as_dict(self) -> dict[int, object]:
        return dict(self.items())

    def with_a0(self, c) -> "LaurentCoeffVector":
        a = list(self.coeffs)
        a[self.shape.e] = c
        return replace(self, coeffs=tuple(a))

    def scaled(self, alpha) -> "LaurentCoeffVector":
        if self.b == 1:
            return replace(self, coeffs=tuple(alpha * a % self.p for a in self.coeffs))
        F = self.base_field
        return replace(self, coeffs=tuple(F.mul(F.coerce(alpha), a) for a in self.coeffs))

    @property
    def key(self) -> tuple:
        return (self.p, self.b, self.shape.d, self.shape.e, self.json_coeffs())

    def json_coeffs(self) -> list:
        return [a if self.b == 1 else list(a) for a in self.coeffs]


def absolute_trace(F: ExtensionField, x) -> int:
    return F.trace(F.coerce(x))


@lru_cache(maxsize=64)
def _embedding(p: int, b: int, k: int):
    big = build_extension(p, b * k)
    if b == 1:
        return big, None
    return big, big.subfield_root(build_extension(p, b).modulus)


def _embed(f: LaurentCoeffVector, big: ExtensionField, root, a):
    if f.b == 1:
        return big.from_int(a)
    out, y = big.zero, big.one
    for c in a:
        out = big.add(out, big.mul(big.from_int(c), y))
        y = big.mul(y, root)
    return out


def _value_coords(f: LaurentCoeffVector, k: int, guard: int):
    """Coordinates of f(g^s) over F_{q^k} for every s, plus the field."""
    big, root = _embedding(f.p, f.b, k)
    P = big.power_table(guard)
    n = big.order - 1
    s = np.arange(n, dtype=np.int64)
    vals = np.zeros((n, big.k), dtype=np.int64)
    for i, a in f.items():
        if f.is_zero(a):
            continue
        M = big.mul_matrix(_embed(f, big, root, a))
        vals += P[(i * s) % n] @ M.T
    return big, vals % f.p


def residue_counts(f: LaurentCoeffVector, k: int, guard: int = DEFAULT_GUARD) -> np.ndarray:
    """c[r] = #{x in V_f(F_{q^k}) : Tr(f(x)) = r}."""
    if k < 1:
        raise ValueError("k must be positive")
    p = f.p
    q_k = p ** (f.b * k)
    if q_k > guard:
        raise SizeGuardError(f"F_{{{p}^{f.b * k}}} has {q_k} elements, guard is {guard}")
    if f.b == 1:
        big = build_extension(p, k)
        T = big.trace_table(guard)
        n = big.order - 1
        s = np.arange(n, dtype=np.int64)
        tr = np.zeros(n, dtype=np.int64)
        for i, a in f.items():
            if a:
                tr += a * T[(i * s) % n]
        tr %= p
        zero_value = (f[0] * k) % p
    else:
        big, vals = _value_coords(f, k, guard)
        tr = (vals @ big.basis_traces) % p
        zero_value = big.trace(_embed(f, big, _embedding(p, f.b, k)[1], f[0]))
    counts = np.bincount(tr, minlength=p).astype(np.int64)
    if f.shape.e == 0:
        counts[zero_value] += 1
    return counts


def _sum_from_counts(p: int, counts: Sequence[int], character: int = 1) -> CyclotomicInteger:
    acc = [0] * p
    for r, c in enumerate(counts):
        acc[r * character % p] += int(c)
    return CyclotomicInteger.from_cyclic(p, acc)


def char_sum(
    f: LaurentCoeffVector, k: int, *, character: int = 1, guard: int = DEFAULT_GUARD
) -> CyclotomicInteger:
    """S(k, f) = sum over the torus (e > 0) or line (e = 0) of psi^c(Tr f(x))."""
    if character % f.p == 0:
        raise ValueError("the character must be nontrivial")
    return _sum_from_counts(f.p, residue_counts(f, k, guard), character)


@dataclass(frozen=True)
class LPolynomial:
    p: int
    coeffs: tuple[CyclotomicInteger, ...]
    power_sums: tuple[CyclotomicInteger, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def valuations(self) -> list:
        return [c.valuation() for c in self.coeffs]

    def to_json(self) -> list[list[int]]:
        return [list(c.coords) for c in self.coeffs]

    @classmethod
    def from_json(cls, p: int, rows: Sequence[Sequence[int]]) -> "LPolynomial":
        return cls(p, tuple(CyclotomicInteger(p, r) for r in rows))

    def predicted_power_sum(self, N: int) -> CyclotomicInteger:
        """S_N implied by the polynomial, from the first ``degree`` power sums onward."""
        S, c, deg = list(self.power_sums), self.coeffs, self.degree
        if N <= len(S):
            return S[N - 1]
        while len(S) < N:
            M = len(S) + 1
            acc = CyclotomicInteger.from_int(self.p, 0)
            for i in range(max(1, M - deg), M):
                acc = acc + S[i - 1] * c[M - i]
            S.append(-acc)
        return S[N - 1]


def l_from_power_sums(p: int, S: Sequence[CyclotomicInteger], deg: int) -> LPolynomial:
    """Coefficients of exp(sum S_k t^k / k) up to t^deg via j c_j = sum_i S_i c_{j-i}."""
    if len(S) < deg:
        raise ValueError("need at least deg power sums")
    c = [CyclotomicInteger.from_int(p, 1)]
    for j in range(1, deg + 1):
        acc = CyclotomicInteger.from_int(p, 0)
        for i in range(1, j + 1):
            acc = acc + S[i - 1] * c[j - i]
        try:
            c.append(acc.exact_div(j))
        except InexactDivision as exc:
            raise LPolynomialError(f"coefficient {j} is not integral: {exc}") from exc
    return LPolynomial(p, tuple(c), tuple(S[:deg]))


def _check_polynomiality(L: LPolynomial, extra: Sequence[CyclotomicInteger]) -> None:
    if not L.coeffs[-1]:
        raise LPolynomialError("leading coefficient vanishes: degree undershoot")
    for j, s in enumerate(extra, start=L.degree + 1):
        if L.predicted_power_sum(j) != s:
            raise LPolynomialError(f"S_{j} disagrees with the reconstructed polynomial")


def l_polynomial(
    f: LaurentCoeffVector, *, checks: int = 2, character: int = 1, guard: int = DEFAULT_GUARD
) -> LPolynomial:
    """L(t, f) over F_q, verified against ``checks`` further power sums."""
    deg = f.shape.length
    S = [char_sum(f, k, character=character, guard=guard) for k in range(1, deg + checks + 1)]
    L = l_from_power_sums(f.p, S, deg)
    _check_polynomiality(L, S[deg:])
    return L


def pi_adic_valuation(z: CyclotomicInteger):
    return z.valuation()


def newton_polygon(L: LPolynomial, b: int = 1) -> LowerPolygon:
    """q-adic Newton polygon, q = p^b."""
    scale = b * (L.p - 1)
    pts = [(j, Fraction(v, scale)) for j, v in enumerate(L.valuations()) if v != math.inf]
    if pts[-1][0] != L.degree:
        raise LPolynomialError("leading coefficient is zero")
    return lower_convex_hull(pts)


def nondegenerate_vectors(p: int, shape: IntervalShape):
    """Every (a_-e..a_d) over F_p with a_0 = 1 and a_d, a_-e nonzero, in lexicographic order."""
    import itertools

    ranges = []
    for i in range(-shape.e, shape.d + 1):
        if i == 0:
            ranges.append((1,))
        elif i == shape.d or (shape.e and i == -shape.e):
            ranges.append(range(1, p))
        else:
            ranges.append(range(p))
    yield from itertools.product(*ranges)


@dataclass
class InstanceReport:
    a: list
    newton: LowerPolygon
    hodge: LowerPolygon
    arithmetic: LowerPolygon
    hasse_value: object
    threshold_met: bool
    hodge_bound_ok: bool
    np_is_arithmetic: bool
    generic_match: bool | None
    stickelberger_ok: bool | None
    notes: list[str] = field(default_factory=list)

    @property
    def counterexample(self) -> bool:
        return (not self.hodge_bound_ok) or self.generic_match is False or self.stickelberger_ok is False

    def to_json(self) -> dict:
        hv = self.hasse_value
        return {
            "a": self.a,
            "H": hv if hv is None or isinstance(hv, int) else list(hv),
            "np": self.newton.to_json(),
            "np_is_arithmetic": self.np_is_arithmetic,
            "hodge_bound_ok": self.hodge_bound_ok,
            "generic_match": self.generic_match,
            "stickelberger_ok": self.stickelberger_ok,
            "threshold_met": self.threshold_met,
        }


def verify_instance(
    f: LaurentCoeffVector,
    *,
    L: LPolynomial | None = None,
    H: HassePolynomial | None = None,
    guard: int = DEFAULT_GUARD,
) -> InstanceReport:
    """Check the Hodge bound, the Hasse criterion and the Stickelberger case for one f."""
    p, shape = f.p, f.shape
    if L is None:
        L = l_polynomial(f, guard=guard)
    NP = newton_polygon(L, f.b)
    hodge = hodge_polygon(shape)
    arith = arithmetic_polygon(p, shape)
    end = Fraction(shape.length, 2)
    hodge_ok = len(NP) == len(hodge) and NP[len(NP)] == end and lies_on_or_above(NP, hodge)
    np_is_arith = NP == arith
    threshold = p >= 3 * shape.D
    notes = []
    hv = None
    generic = None
    if shape.e > 0 and threshold:
        if H is None:
            H = hasse_polynomial(p, shape)
        if f.b == 1:
            hv = H.evaluate(f.as_dict())
            nonzero = hv != 0
        else:
            big = f.base_field
            hv = H.evaluate(f.as_dict(), _FieldOps(big))
            nonzero = any(hv)
        generic = np_is_arith == nonzero
    elif shape.e > 0:
        notes.append(f"p < 3D = {3 * shape.D}: Hasse criterion not checked")
    stick = None
    if (p - 1) % shape.D == 0:
        stick = NP == hodge
    return InstanceReport(
        list(f.json_coeffs()), NP, hodge, arith, hv, threshold, hodge_ok, np_is_arith, generic, stick, notes
    )


class _FieldOps:
    """Adapter giving SparseFpPolynomial.evaluate field arithmetic."""

    def __init__(self, F: ExtensionField):
        self.F = F
        self.zero = F.zero

    def from_int(self, c):
        return self.F.from_int(c)

    def add(self, a, b):
        return self.F.add(a, b)

    def mul(self, a, b):
        return self.F.mul(self.F.coerce(a), self.F.coerce(b))

    def pow(self, a, k):
        return self.F.pow(self.F.coerce(a), k)


def curve_identity_check(f: LaurentCoeffVector, k: int, guard: int = DEFAULT_GUARD) -> bool:
    """(q^k - 1) + sum_{alpha in F_q^*} S(k, alpha f) == q * #{x : Tr_{F_q^k/F_q} f(x) = 0}."""
    if f.shape.e == 0:
        raise ValueError("the identity is stated on the torus (e > 0)")
    p, b = f.p, f.b
    q = p**b
    base = f.base_field
    lhs = CyclotomicInteger.from_int(p, q**k - 1)
    for n in range(1, q):
        alpha = n if b == 1 else base.decode(n)
        lhs = lhs + char_sum(f.scaled(alpha), k, guard=guard)
    if not lhs.is_rational_integer():
        raise ArithmeticError(f"left side {lhs} is not a rational integer")
    if b == 1:
        zeros = int(residue_counts(f, k, guard)[0])
    else:
        big, vals = _value_coords(f, k, guard)
        R = np.array(
            [big.relative_trace(tuple(int(i == j) for i in range(big.k)), b) for j in range(big.k)],
            dtype=np.int64,
        ).T
        zeros = int(np.count_nonzero(~((vals @ R.T) % p).any(axis=1)))
    return lhs.coords[0] == q * zeros


def a0_independence_check(f: LaurentCoeffVector, c, guard: int = DEFAULT_GUARD) -> bool:
    base = newton_polygon(l_polynomial(f, guard=guard), f.b)
    other = newton_polygon(l_polynomial(f.with_a0(c), guard=guard), f.b)
    return base == other


def galois_consistency_check(f: LaurentCoeffVector, c: int, guard: int = DEFAULT_GUARD) -> bool:
    """psi -> psi^c acts on L by zeta -> zeta^c and leaves the polygon alone."""
    L1 = l_polynomial(f, guard=guard)
    Lc = l_polynomial(f, character=c, guard=guard)
    same_coeffs = all(x.galois(c) == y for x, y in zip(L1.coeffs, Lc.coeffs))
    return same_coeffs and newton_polygon(L1, f.b) == newton_polygon(Lc, f.b)


class BatchOracle:
    """L-polynomials for many coefficient vectors over F_p at once (b = 1).

    For each k the points x are grouped by their trace vector
    (Tr x^i)_{i != 0}; a coefficient vector then only needs one dot product
    per distinct trace vector.
    """

    def __init__(self, p: int, shape: IntervalShape, *, checks: int = 2, guard: int = DEFAULT_GUARD):
        shape.check_prime(p)
        self.p, self.shape, self.checks, self.guard = p, shape, checks, guard
        self.subscripts = [i for i in range(-shape.e, shape.d + 1) if i != 0]
        self._hist: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def histogram(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        if k not in self._hist:
            p = self.p
            big = build_extension(p, k)
            if big.order > self.guard:
                raise SizeGuardError(f"F_{{{p}^{k}}} exceeds guard {self.guard}")
            T = big.trace_table(self.guard)
            n = big.order - 1
            s = np.arange(n, dtype=np.int64)
            code = np.zeros(n, dtype=np.int64)
            for i in self.subscripts:
                code = code * p + T[(i * s) % n]
            if self.shape.e == 0:
                code = np.append(code, 0)  # x = 0: all traces vanish
            uniq, counts = np.unique(code, return_counts=True)
            vecs = np.empty((len(uniq), len(self.subscripts)), dtype=np.int64)
            rest = uniq.copy()
            for j in range(len(self.subscripts) - 1, -1, -1):
                rest, vecs[:, j] = np.divmod(rest, p)
            self._hist[k] = (vecs, counts.astype(np.int64))
        return self._hist[k]

    def residue_counts(self, A: np.ndarray, k: int) -> np.ndarray:
        """Rows of A are full vectors (a_-e..a_d); returns counts of shape (len(A), p)."""
        p, e = self.p, self.shape.e
        A = np.asarray(A, dtype=np.int64)
        vecs, hist = self.histogram(k)
        free = np.delete(A, e, axis=1)
        shift = (A[:, e] * k) % p
        out = np.zeros((len(A), p), dtype=np.int64)
        chunk = max(1, 4_000_000 // max(1, len(vecs)))
        for lo in range(0, len(A), chunk):
            R = (free[lo : lo + chunk] @ vecs.T + shift[lo : lo + chunk, None]) % p
            for r in range(p):
                out[lo : lo + chunk, r] = (R == r) @ hist
        return out

    def l_polynomials(self, A: np.ndarray, character: int = 1) -> list[LPolynomial]:
        deg = self.shape.length
        counts = [self.residue_counts(A, k) for k in range(1, deg + self.checks + 1)]
        out = []
        for row in range(len(A)):
            S = [_sum_from_counts(self.p, c[row], character) for c in counts]
            L = l_from_power_sums(self.p, S, deg)
            _check_polynomiality(L, S[deg:])
            out.append(L)
        return out
