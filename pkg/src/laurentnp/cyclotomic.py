"""Exact arithmetic in Z[zeta_p] on the power basis 1, zeta, ..., zeta^(p-2)."""
from __future__ import annotations

import cmath
import math
from typing import Iterable, Sequence

__all__ = ["CyclotomicInteger", "InexactDivision"]


class InexactDivision(ArithmeticError):
    pass


class CyclotomicInteger:
    __slots__ = ("p", "coords")

    def __init__(self, p: int, coords: Iterable[int]):
        c = tuple(int(x) for x in coords)
        if len(c) != p - 1:
            raise ValueError(f"need {p - 1} coordinates, got {len(c)}")
        self.p = p
        self.coords = c

    @classmethod
    def from_int(cls, p: int, n: int) -> "CyclotomicInteger":
        return cls(p, (n,) + (0,) * (p - 2))

    @classmethod
    def zeta(cls, p: int, power: int = 1) -> "CyclotomicInteger":
        return cls.from_cyclic(p, [int(j == power % p) for j in range(p)])

    @classmethod
    def from_cyclic(cls, p: int, v: Sequence[int]) -> "CyclotomicInteger":
        """Reduce sum_j v[j] zeta^j (j = 0..p-1) using zeta^(p-1) = -(1 + ... + zeta^(p-2))."""
        top = int(v[p - 1])
        return cls(p, (int(v[j]) - top for j in range(p - 1)))

    from_residue_counts = from_cyclic

    def cyclic(self) -> list[int]:
        return list(self.coords) + [0]

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = CyclotomicInteger.from_int(self.p, other)
        if not isinstance(other, CyclotomicInteger):
            return NotImplemented
        return self.p == other.p and self.coords == other.coords

    def __hash__(self) -> int:
        return hash((self.p, self.coords))

    def __repr__(self) -> str:
        return f"CyclotomicInteger({self.p}, {list(self.coords)})"

    def __bool__(self) -> bool:
        return any(self.coords)

    def _lift(self, other) -> "CyclotomicInteger":
        if isinstance(other, int):
            return CyclotomicInteger.from_int(self.p, other)
        if other.p != self.p:
            raise ValueError("mixing different cyclotomic rings")
        return other

    def __add__(self, other):
        o = self._lift(other)
        return CyclotomicInteger(self.p, (a + b for a, b in zip(self.coords, o.coords)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicInteger(self.p, (-a for a in self.coords))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if isinstance(other, int):
            return CyclotomicInteger(self.p, (a * other for a in self.coords))
        o = self._lift(other)
        p = self.p
        acc = [0] * p
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(o.coords):
                    if b:
                        acc[(i + j) % p] += a * b
        return CyclotomicInteger.from_cyclic(p, acc)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result, base = CyclotomicInteger.from_int(self.p, 1), self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exact_div(self, n: int) -> "CyclotomicInteger":
        if any(a % n for a in self.coords):
            raise InexactDivision(f"{self} is not divisible by {n}")
        return CyclotomicInteger(self.p, (a // n for a in self.coords))

    def is_rational_integer(self) -> bool:
        return not any(self.coords[1:])

    def galois(self, c: int) -> "CyclotomicInteger":
        """Image under zeta -> zeta^c, c prime to p."""
        if c % self.p == 0:
            raise ValueError("c must be prime to p")
        acc = [0] * self.p
        for j, a in enumerate(self.coords):
            acc[j * c % self.p] += a
        return CyclotomicInteger.from_cyclic(self.p, acc)

    def to_complex(self, c: int = 1) -> complex:
        w = cmath.exp(2j * math.pi * c / self.p)
        return sum(a * w**j for j, a in enumerate(self.coords))

    def content(self) -> int:
        return math.gcd(*self.coords)

    def div_one_minus_zeta(self) -> "CyclotomicInteger":
        """Exact quotient by (1 - zeta); raises InexactDivision otherwise."""
        p, z = self.p, self.coords
        s = sum(z)
        if s % p:
            raise InexactDivision("not divisible by 1 - zeta")
        c = s // p
        w, prefix = [], 0
        for j, zj in enumerate(z):
            prefix += zj
            w.append(prefix - (j + 1) * c)
        return CyclotomicInteger(p, w)

    def valuation(self) -> float | int:
        """(1 - zeta)-adic valuation; ``math.inf`` for zero.

        Full factors of p are stripped first, each worth p-1 since
        p = unit * (1 - zeta)^(p-1); the remainder is divided by (1 - zeta)
        one step at a time.
        """
        if not self:
            return math.inf
        p = self.p
        v, x = 0, self
        g = x.content()
        while g % p == 0:
            g //= p
            v += p - 1
            x = x.exact_div(p)
        while True:
            try:
                x = x.div_one_minus_zeta()
            except InexactDivision:
                return v
            v += 1
