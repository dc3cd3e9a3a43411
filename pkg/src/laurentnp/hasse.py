"""Artin-Hasse coefficients and the Hasse polynomial of [-e, d] over F_p.

Variables are addressed by their subscript in [-e, d]; a monomial is a
tuple of exponents indexed by ``subscript + e``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .polygons import IntervalShape, ThresholdWarning, minimizing_pairs

__all__ = [
    "HasseError",
    "artin_hasse",
    "lambda_mod_p",
    "r_vector",
    "SkPermutation",
    "enumerate_sk",
    "unit_u_tau",
    "monomial_of",
    "SparseFpPolynomial",
    "hasse_component",
    "HassePolynomial",
    "hasse_polynomial",
    "evaluate",
    "MinimalMonomial",
    "minimal_monomial",
]


class HasseError(RuntimeError):
    """A computed object contradicts a structural claim (unit, nonvanishing, uniqueness)."""


@lru_cache(maxsize=None)
def _artin_hasse(p: int, N: int) -> tuple[Fraction, ...]:
    # E' = E * sum_i t^(p^i - 1), so n*lam_n = sum_{p^i <= n} lam_{n - p^i}
    powers = []
    q = 1
    while q <= N:
        powers.append(q)
        q *= p
    lam = [Fraction(1)]
    for n in range(1, N + 1):
        lam.append(sum((lam[n - q] for q in powers if q <= n), Fraction(0)) / n)
    return tuple(lam)


def artin_hasse(p: int, N: int) -> list[Fraction]:
    """Exact coefficients lambda_0..lambda_N of exp(sum_i t^(p^i)/p^i).

    Every coefficient is checked to be p-integral.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    lam = _artin_hasse(p, N)
    for n, c in enumerate(lam):
        if c.denominator % p == 0:
            raise HasseError(f"lambda_{n} = {c} is not {p}-integral")
    return list(lam)


def lambda_mod_p(p: int, n: int) -> int:
    c = _artin_hasse(p, n)[n]
    if c.denominator % p == 0:
        raise HasseError(f"lambda_{n} has denominator divisible by {p}")
    return c.numerator * pow(c.denominator, -1, p) % p


def lambda_mod(p: int, n: int, modulus: int) -> int:
    """lambda_n reduced modulo any power of p."""
    c = _artin_hasse(p, n)[n]
    return c.numerator * pow(c.denominator, -1, modulus) % modulus


def _singleton(p: int, shape: IntervalShape, k: int) -> tuple[int, int]:
    v = minimizing_pairs(p, shape, k)
    if len(v) != 1:
        raise ValueError(f"V_{k} has {len(v)} pairs; need exactly one")
    return v[0]


def r_vector(p: int, shape: IntervalShape, k: int) -> dict[int, int]:
    shape.check_prime(p)
    m, n = _singleton(p, shape, k)
    d, e = shape.d, shape.e
    r = {}
    for i in range(1, n + 1):
        # d * frac(-(p*i - n)/d) == (n - p*i) mod d
        r[i] = n - (n - p * i) % d + d
    for i in range(-m, 0):
        r[i] = m - (p * i + m) % e + e
    pos = [r[i] for i in range(1, n + 1)]
    neg = [r[i] for i in range(-m, 0)]
    if len(set(pos)) != len(pos) or len(set(neg)) != len(neg):
        raise HasseError(f"r-values not distinct: {r}")
    if any(v > n + d for v in pos) or any(v > m + e for v in neg):
        raise HasseError(f"r-values out of bounds: {r}")
    return r


@dataclass(frozen=True)
class SkPermutation:
    """A permutation of {-m..n}; ``images[j]`` is the image of ``j - m``."""

    m: int
    n: int
    images: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.images[i + self.m]

    @property
    def domain(self) -> range:
        return range(-self.m, self.n + 1)

    @property
    def sign(self) -> int:
        perm = [v + self.m for v in self.images]
        seen = [False] * len(perm)
        s = 1
        for start in range(len(perm)):
            if seen[start]:
                continue
            j, length = start, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                s = -s
        return s

    def as_dict(self) -> dict[int, int]:
        return {i: self(i) for i in self.domain}


def _bounds(p: int, shape: IntervalShape, k: int) -> tuple[int, int, dict[int, tuple[int, int]]]:
    m, n = _singleton(p, shape, k)
    r = r_vector(p, shape, k)
    box = {0: (0, 0)}
    for i in range(1, n + 1):
        box[i] = (r[i] - shape.d, n)
    for i in range(-m, 0):
        box[i] = (-m, -r[i] + shape.e)
    return m, n, box


def enumerate_sk(p: int, shape: IntervalShape, k: int) -> list[SkPermutation]:
    """All permutations of {-m..n} obeying the per-index image bounds."""
    m, n, box = _bounds(p, shape, k)
    # most constrained index first
    order = sorted(box, key=lambda i: (box[i][1] - box[i][0], i))
    used: set[int] = set()
    assign: dict[int, int] = {}
    found: list[SkPermutation] = []

    def walk(depth: int) -> None:
        if depth == len(order):
            found.append(SkPermutation(m, n, tuple(assign[i] for i in range(-m, n + 1))))
            return
        i = order[depth]
        lo, hi = box[i]
        for v in range(max(lo, -m), min(hi, n) + 1):
            if v in used:
                continue
            used.add(v)
            assign[i] = v
            walk(depth + 1)
            used.discard(v)
        assign.pop(i, None)

    walk(0)
    found.sort(key=lambda t: t.images)
    return found


def _factor_indices(p: int, shape: IntervalShape, tau: SkPermutation) -> list[int]:
    """Indices n of the lambda_n factors in u_tau (two per nonzero domain element)."""
    out = []
    for i in range(1, tau.n + 1):
        num = p * i - tau(i)
        out += [num // shape.d, 1 if num % shape.d else 0]
    for i in range(-tau.m, 0):
        num = -p * i + tau(i)
        out += [num // shape.e, 1 if num % shape.e else 0]
    return out


def unit_u_tau(p: int, shape: IntervalShape, k: int, tau: SkPermutation) -> int:
    u = tau.sign % p
    for idx in _factor_indices(p, shape, tau):
        u = u * lambda_mod_p(p, idx) % p
    if u == 0:
        raise HasseError(f"u_tau vanishes mod {p} for tau = {tau.as_dict()} (k = {k})")
    return u


def monomial_of(shape: IntervalShape, r: Mapping[int, int], tau: SkPermutation) -> tuple[int, ...]:
    exps = [0] * (shape.d + shape.e + 1)
    for i in range(1, tau.n + 1):
        exps[r[i] - tau(i) + shape.e] += 1
    for i in range(-tau.m, 0):
        exps[-r[i] - tau(i) + shape.e] += 1
    return tuple(exps)


class SparseFpPolynomial:
    """Polynomial over F_p in x_{-e}..x_d, stored as {exponent tuple: coeff}."""

    def __init__(self, p: int, shape: IntervalShape, terms: Mapping[tuple[int, ...], int] | None = None):
        self.p = p
        self.shape = shape
        self.nvars = shape.d + shape.e + 1
        self.terms: dict[tuple[int, ...], int] = {}
        for mono, c in (terms or {}).items():
            if len(mono) != self.nvars:
                raise ValueError("exponent vector has wrong length")
            c %= p
            if c:
                self.terms[tuple(mono)] = c

    @classmethod
    def variable(cls, p: int, shape: IntervalShape, subscript: int) -> "SparseFpPolynomial":
        exps = [0] * (shape.d + shape.e + 1)
        exps[subscript + shape.e] = 1
        return cls(p, shape, {tuple(exps): 1})

    @classmethod
    def one(cls, p: int, shape: IntervalShape) -> "SparseFpPolynomial":
        return cls(p, shape, {(0,) * (shape.d + shape.e + 1): 1})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseFpPolynomial):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and self.terms == other.terms

    def __mul__(self, other: "SparseFpPolynomial") -> "SparseFpPolynomial":
        out: dict[tuple[int, ...], int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                key = tuple(a + b for a, b in zip(m1, m2))
                out[key] = (out.get(key, 0) + c1 * c2) % self.p
        return SparseFpPolynomial(self.p, self.shape, out)

    def total_degrees(self) -> set[int]:
        return {sum(m) for m in self.terms}

    def divisible_by(self, subscript: int) -> bool:
        return all(m[subscript + self.shape.e] > 0 for m in self.terms)

    def evaluate(self, values: Mapping[int, object], field=None):
        """Substitute x_i = values[i]; ``field`` supplies add/mul for F_q, q > p."""
        e = self.shape.e
        if set(values) != set(range(-e, self.shape.d + 1)):
            raise ValueError("need one value per subscript in [-e, d]")
        if field is None:
            total = 0
            for mono, c in self.terms.items():
                t = c
                for j, k in enumerate(mono):
                    if k:
                        t = t * pow(int(values[j - e]), k, self.p) % self.p
                total += t
            return total % self.p
        total = field.zero
        for mono, c in self.terms.items():
            t = field.from_int(c)
            for j, k in enumerate(mono):
                if k:
                    t = field.mul(t, field.pow(values[j - e], k))
            total = field.add(total, t)
        return total

    def to_json(self) -> dict:
        e = self.shape.e
        terms = []
        for mono in sorted(self.terms):
            exps = {str(j - e): k for j, k in enumerate(mono) if k}
            terms.append({"exponents": exps, "coeff": self.terms[mono]})
        return {"p": self.p, "d": self.shape.d, "e": e, "terms": terms}

    @classmethod
    def from_json(cls, obj: dict) -> "SparseFpPolynomial":
        shape = IntervalShape(obj["d"], obj["e"])
        terms = {}
        for t in obj["terms"]:
            exps = [0] * (shape.d + shape.e + 1)
            for sub, k in t["exponents"].items():
                exps[int(sub) + shape.e] = k
            terms[tuple(exps)] = t["coeff"]
        return cls(obj["p"], shape, terms)

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        sup = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")
        e = self.shape.e

        def var(sub: int, k: int) -> str:
            name = f"x_{sub}" if sub >= 0 else f"x_{{{sub}}}"
            return name + (str(k).translate(sup) if k > 1 else "")

        parts = []
        for mono in sorted(self.terms, key=lambda m: tuple(-k for k in m)):
            subs = sorted((j - e for j, k in enumerate(mono) if k), key=lambda s: (s < 0, abs(s)))
            factors = [var(s, mono[s + e]) for s in subs]
            c = self.terms[mono]
            parts.append("·".join(([str(c)] if c != 1 or not factors else []) + factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"SparseFpPolynomial(p={self.p}, {self.pretty()})"


def hasse_component(p: int, shape: IntervalShape, k: int) -> SparseFpPolynomial:
    """The reduction mod p of the k-th component polynomial (V_k a singleton)."""
    r = r_vector(p, shape, k)
    terms: dict[tuple[int, ...], int] = {}
    for tau in enumerate_sk(p, shape, k):
        mono = monomial_of(shape, r, tau)
        terms[mono] = (terms.get(mono, 0) + unit_u_tau(p, shape, k, tau)) % p
    poly = SparseFpPolynomial(p, shape, terms)
    if not poly:
        raise HasseError(f"component H_{k} vanishes mod {p} for {shape}")
    return poly


@dataclass
class HassePolynomial:
    """x_d * x_{-e} times the components, kept factored for cheap evaluation."""

    p: int
    shape: IntervalShape
    components: dict[int, SparseFpPolynomial]
    sk_sizes: dict[int, int]

    def expand(self) -> SparseFpPolynomial:
        out = SparseFpPolynomial.variable(self.p, self.shape, self.shape.d)
        out = out * SparseFpPolynomial.variable(self.p, self.shape, -self.shape.e)
        for k in sorted(self.components):
            out = out * self.components[k]
        return out

    def evaluate(self, values: Mapping[int, object], field=None):
        if field is None:
            v = int(values[self.shape.d]) * int(values[-self.shape.e]) % self.p
            for comp in self.components.values():
                if not v:
                    break
                v = v * comp.evaluate(values) % self.p
            return v
        v = field.mul(values[self.shape.d], values[-self.shape.e])
        for comp in self.components.values():
            v = field.mul(v, comp.evaluate(values, field))
        return v


def hasse_polynomial(p: int, shape: IntervalShape) -> HassePolynomial:
    shape.check_prime(p)
    if shape.e == 0:
        raise ValueError("the Hasse polynomial is defined for e > 0")
    if p < 3 * shape.D:
        warnings.warn(f"p = {p} < 3D = {3 * shape.D}", ThresholdWarning, stacklevel=2)
    comps, sizes = {}, {}
    for k in range(1, shape.d + shape.e):
        if len(minimizing_pairs(p, shape, k)) == 1:
            comps[k] = hasse_component(p, shape, k)
            sizes[k] = len(enumerate_sk(p, shape, k))
    return HassePolynomial(p, shape, comps, sizes)


def evaluate(H, a: Mapping[int, object] | Sequence[object], field=None):
    """Evaluate a Hasse polynomial (factored or expanded) at a coefficient vector.

    A sequence is read as (a_{-e}, ..., a_d).
    """
    if not isinstance(a, Mapping):
        e = H.shape.e
        if len(a) != H.shape.d + e + 1:
            raise ValueError("coefficient vector length does not match [-e, d]")
        a = {i - e: v for i, v in enumerate(a)}
    return H.evaluate(a, field)


def _pos_key(shape: IntervalShape, mono: tuple[int, ...]) -> tuple[int, ...]:
    """Positive-subscript part as a descending sequence of subscripts."""
    e = shape.e
    subs = [s for s in range(1, shape.d + 1) for _ in range(mono[s + e])]
    return tuple(sorted(subs, reverse=True))


def _neg_key(shape: IntervalShape, mono: tuple[int, ...]) -> tuple[int, ...]:
    e = shape.e
    subs = [s for s in range(1, e + 1) for _ in range(mono[-s + e])]
    return tuple(sorted(subs, reverse=True))


@dataclass(frozen=True)
class MinimalMonomial:
    monomial: tuple[int, ...]
    multiplicity: int
    tau0: SkPermutation
    tau0_attains: bool


def tau_zero(p: int, shape: IntervalShape, k: int) -> SkPermutation:
    """Rank positive (negative) indices by descending r and fill n, n-1, ... (-m, -m+1, ...)."""
    m, n = _singleton(p, shape, k)
    r = r_vector(p, shape, k)
    img = {0: 0}
    for j, i in enumerate(sorted(range(1, n + 1), key=lambda i: -r[i]), start=1):
        img[i] = n + 1 - j
    for j, t in enumerate(sorted(range(-m, 0), key=lambda i: -r[i]), start=1):
        img[t] = -(m + 1 - j)
    return SkPermutation(m, n, tuple(img[i] for i in range(-m, n + 1)))


def minimal_monomial(p: int, shape: IntervalShape, k: int) -> MinimalMonomial:
    """Least monomial of H_k under the product order, with its multiplicity.

    Within the positive (resp. negative) variables, two monomials of equal
    degree compare by the largest subscript (magnitude) in which they differ,
    which is lexicographic order on descending subscript sequences.  The
    full order is the product of the two; a least element must minimize both.
    """
    r = r_vector(p, shape, k)
    sk = enumerate_sk(p, shape, k)
    monos = [monomial_of(shape, r, tau) for tau in sk]
    pos_min = min(_pos_key(shape, mo) for mo in monos)
    neg_min = min(_neg_key(shape, mo) for mo in monos)
    least = {mo for mo in monos if _pos_key(shape, mo) == pos_min and _neg_key(shape, mo) == neg_min}
    if not least:
        raise HasseError(f"no monomial is least in both halves for k = {k}: incomparable minima")
    (mono,) = least
    mult = monos.count(mono)
    t0 = tau_zero(p, shape, k)
    attains = t0 in sk and monomial_of(shape, r, t0) == mono
    if mult != 1:
        raise HasseError(f"least monomial of H_{k} appears {mult} times")
    return MinimalMonomial(mono, mult, t0, attains)
