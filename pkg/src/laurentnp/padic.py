"""Z_p[zeta_p] modulo p^M.

Elements are numpy vectors in the cyclic representation sum_{j<p} v_j zeta^j
(so multiplication is a cyclic convolution); :meth:`PadicCyclotomic.coords`
returns the reduced power-basis coordinates.  Arrays switch to Python-int
object dtype whenever int64 products could overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cyclotomic import CyclotomicInteger

__all__ = [
    "PadicCyclotomic",
    "Valuation",
    "work_dtype",
    "cyc_mul",
    "cyc_matmul",
    "reduce_power_basis",
    "valuation_of_coords",
]

_INT64_SAFE = 2**62


def work_dtype(p: int, M: int, terms: int = 1):
    """int64 if sums of ``terms`` cyclic products mod p^M stay below 2^62."""
    return np.int64 if (p**M) ** 2 * p * max(terms, 1) < _INT64_SAFE else object


def _circulant(c: np.ndarray) -> np.ndarray:
    p = len(c)
    idx = (np.arange(p)[None, :] - np.arange(p)[:, None]) % p
    return c[idx]  # row u, column w holds c[w - u]


def cyc_mul(a: np.ndarray, c: np.ndarray, mod: int) -> np.ndarray:
    """Elementwise product of an array of ring elements (last axis p) by one element c."""
    return (a @ _circulant(c)) % mod


def cyc_matmul(A: np.ndarray, B: np.ndarray, mod: int) -> np.ndarray:
    """Matrix product over the cyclic group ring; A, B have shape (n, n, p)."""
    p = A.shape[-1]
    out = np.zeros(A.shape[:-1][:1] + B.shape[1:-1] + (p,), dtype=A.dtype)
    Bs = [B[..., s] for s in range(p)]
    for u in range(p):
        Au = A[..., u]
        for s in range(p):
            out[..., (u + s) % p] += Au @ Bs[s]
        out %= mod
    return out


def reduce_power_basis(v, mod: int) -> list[int]:
    """Cyclic vector of length p to power-basis coordinates in [0, mod)."""
    p = len(v)
    top = int(v[p - 1])
    return [(int(v[j]) - top) % mod for j in range(p - 1)]


@dataclass(frozen=True)
class Valuation:
    """pi-adic valuation; ``exact`` is False when the element is 0 mod p^M."""

    value: int
    exact: bool

    def __int__(self) -> int:
        return self.value


def _multiplicity_at_one(poly: list[int], p: int) -> int:
    """Number of factors (x - 1) of a nonzero polynomial over F_p."""
    poly = [c % p for c in poly]
    count = 0
    while True:
        # synthetic division by (x - 1)
        q, acc = [], 0
        for c in reversed(poly):
            acc = (acc + c) % p
            q.append(acc)
        if q[-1] != 0:
            return count
        poly = list(reversed(q[:-1]))
        count += 1


def valuation_of_coords(coords, p: int, M: int) -> Valuation:
    """Valuation of a power-basis element known modulo p^M."""
    mod = p**M
    c = [int(x) % mod for x in coords]
    if not any(c):
        return Valuation(M * (p - 1), False)
    s = min(_vp(x, p) for x in c if x)
    unit = [x // p**s for x in c]
    return Valuation(s * (p - 1) + _multiplicity_at_one(unit, p), True)


def _vp(x: int, p: int) -> int:
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


class PadicCyclotomic:
    """A single element of Z_p[zeta_p] / p^M."""

    __slots__ = ("p", "M", "v")

    def __init__(self, p: int, M: int, cyclic):
        self.p, self.M = p, M
        mod = p**M
        dt = work_dtype(p, M)
        self.v = np.array([int(x) % mod for x in cyclic], dtype=dt)
        if len(self.v) != p:
            raise ValueError("cyclic representation needs p entries")

    @property
    def modulus(self) -> int:
        return self.p**self.M

    @classmethod
    def from_int(cls, p: int, M: int, n: int) -> "PadicCyclotomic":
        return cls(p, M, [n] + [0] * (p - 1))

    @classmethod
    def zeta(cls, p: int, M: int) -> "PadicCyclotomic":
        return cls(p, M, [int(j == 1) for j in range(p)])

    @classmethod
    def from_cyclotomic(cls, z: CyclotomicInteger, M: int) -> "PadicCyclotomic":
        return cls(z.p, M, list(z.coords) + [0])

    def coords(self) -> list[int]:
        return reduce_power_basis(self.v, self.modulus)

    def __repr__(self) -> str:
        return f"PadicCyclotomic(p={self.p}, M={self.M}, {self.coords()})"

    def _other(self, o) -> np.ndarray:
        if isinstance(o, int):
            return PadicCyclotomic.from_int(self.p, self.M, o).v
        if o.p != self.p:
            raise ValueError("different primes")
        return o.v

    def __add__(self, o):
        return PadicCyclotomic(self.p, self.M, self.v + self._other(o))

    __radd__ = __add__

    def __sub__(self, o):
        return PadicCyclotomic(self.p, self.M, self.v - self._other(o))

    def __rsub__(self, o):
        return PadicCyclotomic(self.p, self.M, self._other(o) - self.v)

    def __neg__(self):
        return PadicCyclotomic(self.p, self.M, -self.v)

    def __mul__(self, o):
        if isinstance(o, int):
            return PadicCyclotomic(self.p, self.M, self.v * (o % self.modulus))
        return PadicCyclotomic(self.p, self.M, cyc_mul(self.v, self._other(o), self.modulus))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result, base = PadicCyclotomic.from_int(self.p, self.M, 1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, o) -> bool:
        if isinstance(o, int):
            o = PadicCyclotomic.from_int(self.p, self.M, o)
        if not isinstance(o, PadicCyclotomic):
            return NotImplemented
        return self.p == o.p and self.coords() == o.coords()

    def __hash__(self):
        return hash((self.p, self.M, tuple(self.coords())))

    def valuation(self) -> Valuation:
        return valuation_of_coords(self.coords(), self.p, self.M)

    def residue(self) -> int:
        """Image in the residue field F_p (zeta -> 1)."""
        return int(sum(int(x) for x in self.v)) % self.p

    def inverse(self) -> "PadicCyclotomic":
        r = self.residue()
        if r == 0:
            raise ZeroDivisionError("not a unit")
        w = PadicCyclotomic.from_int(self.p, self.M, pow(r, -1, self.p))
        # each step doubles the valuation of 1 - self*w
        for _ in range(math.ceil(math.log2(self.M * (self.p - 1) + 1)) + 1):
            w = w * (2 - self * w)
        if self * w != 1:
            raise ArithmeticError("inverse iteration did not converge")
        return w

    def with_precision(self, M: int) -> "PadicCyclotomic":
        return PadicCyclotomic(self.p, M, [int(x) for x in self.v])

    def exact_div_p(self, k: int) -> "PadicCyclotomic":
        """Divide by p^k, losing k digits; coordinates must be divisible."""
        c = self.coords()
        if any(x % self.p**k for x in c):
            raise ArithmeticError("not divisible by the requested power of p")
        return PadicCyclotomic(self.p, self.M - k, [x // self.p**k for x in c] + [0])
