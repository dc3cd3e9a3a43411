"""Prime-power finite fields F_p[x]/(modulus) with numpy bulk tables.

Elements are tuples of k residues (coefficients of 1, x, ..., x^(k-1)).
The modulus is the lexicographically least monic irreducible polynomial of
degree k, ordering coefficient vectors (c_{k-1}, ..., c_0) as base-p digits,
so the same field comes out on every machine.
"""
from __future__ import annotations

from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from .polygons import is_prime

__all__ = ["ExtensionField", "build_extension", "SizeGuardError", "prime_factors"]

DEFAULT_GUARD = 10**8


class SizeGuardError(ValueError):
    pass


def prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


# dense polynomials over F_p as lists, lowest degree first, no trailing zeros

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: list[int], m: list[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    inv = pow(m[-1], -1, p)
    while len(a) >= len(m):
        c = a[-1] * inv % p
        shift = len(a) - len(m)
        for i, mc in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mc) % p
        _trim(a)
    return a


def _pmul(a: list[int], b: list[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def _powmod_x(exp: int, m: list[int], p: int) -> list[int]:
    result, base = [1], [0, 1]
    while exp:
        if exp & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        exp >>= 1
    return result


def is_irreducible(m: Sequence[int], p: int) -> bool:
    """Rabin's test for a monic polynomial given lowest coefficient first."""
    m = list(m)
    k = len(m) - 1
    if k == 1:
        return True
    if _pmod(_pmul(_powmod_x(p**k, m, p), [1], p), m, p) != _pmod([0, 1], m, p):
        return False
    for r in prime_factors(k):
        h = _powmod_x(p ** (k // r), m, p)
        h = h + [0] * max(0, 2 - len(h))
        h[1] = (h[1] - 1) % p
        if len(_pgcd(m, _trim(h), p)) != 1:
            return False
    return True


class ExtensionField:
    """F_{p^k} as F_p[x]/(modulus)."""

    def __init__(self, p: int, k: int, modulus: Sequence[int] | None = None):
        if not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if k < 1:
            raise ValueError("degree must be positive")
        self.p, self.k = p, k
        self.order = p**k
        if modulus is None:
            modulus = _least_irreducible(p, k)
        self.modulus = tuple(modulus)
        if len(self.modulus) != k + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        if not is_irreducible(self.modulus, p):
            raise ValueError(f"modulus {self.modulus} is reducible mod {p}")

    def __repr__(self) -> str:
        return f"ExtensionField(p={self.p}, k={self.k}, modulus={self.modulus})"

    # element arithmetic

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.k

    @property
    def one(self) -> tuple[int, ...]:
        return self.from_int(1)

    def from_int(self, c: int) -> tuple[int, ...]:
        return (c % self.p,) + (0,) * (self.k - 1)

    def coerce(self, a) -> tuple[int, ...]:
        if isinstance(a, (int, np.integer)):
            return self.from_int(int(a))
        a = tuple(int(c) % self.p for c in a)
        if len(a) != self.k:
            raise ValueError(f"element {a} does not have {self.k} coordinates")
        return a

    def add(self, a, b):
        return tuple((x + y) % self.p for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple((x - y) % self.p for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x % self.p for x in a)

    def mul(self, a, b):
        r = _pmod(_pmul(list(a), list(b), self.p), list(self.modulus), self.p)
        return tuple(r) + (0,) * (self.k - len(r))

    def pow(self, a, n: int):
        if n < 0:
            return self.pow(self.inv(a), -n)
        result, base = self.one, a
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def inv(self, a):
        if not any(a):
            raise ZeroDivisionError("inverse of zero")
        return self.pow(a, self.order - 2)

    def frobenius(self, a, times: int = 1):
        return self.pow(a, self.p**times)

    def trace(self, a) -> int:
        """Absolute trace a + a^p + ... + a^(p^(k-1)) as an element of F_p."""
        total, y = self.zero, a
        for _ in range(self.k):
            total = self.add(total, y)
            y = self.pow(y, self.p)
        if any(total[1:]):
            raise ArithmeticError("trace did not land in F_p")
        return total[0]

    def relative_trace(self, a, sub_degree: int):
        """Trace down to the subfield of degree ``sub_degree`` over F_p."""
        if self.k % sub_degree:
            raise ValueError("subfield degree must divide the field degree")
        q = self.p**sub_degree
        total, y = self.zero, a
        for _ in range(self.k // sub_degree):
            total = self.add(total, y)
            y = self.pow(y, q)
        return total

    def elements(self) -> Iterator[tuple[int, ...]]:
        for n in range(self.order):
            yield self.decode(n)

    def encode(self, a) -> int:
        return sum(int(c) * self.p**i for i, c in enumerate(a))

    def decode(self, n: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.k):
            n, c = divmod(n, self.p)
            out.append(c)
        return tuple(out)

    def element_order(self, a) -> int:
        n = self.order - 1
        for r in prime_factors(n):
            while n % r == 0 and self.pow(a, n // r) == self.one:
                n //= r
        return n

    @cached_property
    def generator(self) -> tuple[int, ...]:
        """Least (by encoding) primitive element."""
        for n in range(1, self.order):
            a = self.decode(n)
            if self.element_order(a) == self.order - 1:
                return a
        raise ArithmeticError("no primitive element found")

    # linear algebra views

    def mul_matrix(self, a) -> np.ndarray:
        """Matrix of y -> a*y acting on coordinate column vectors."""
        cols = [self.mul(a, tuple(int(i == j) for i in range(self.k))) for j in range(self.k)]
        return np.array(cols, dtype=np.int64).T

    @cached_property
    def basis_traces(self) -> np.ndarray:
        return np.array(
            [self.trace(tuple(int(i == j) for i in range(self.k))) for j in range(self.k)],
            dtype=np.int64,
        )

    def power_table(self, guard: int = DEFAULT_GUARD) -> np.ndarray:
        """Coordinates of g^s for s = 0..order-2, g = ``self.generator``."""
        return _power_table(self, guard)

    def trace_table(self, guard: int = DEFAULT_GUARD) -> np.ndarray:
        """Tr(g^s) for s = 0..order-2."""
        return _trace_table(self, guard)

    def subfield_root(self, modulus: Sequence[int]):
        """A root in this field of an irreducible polynomial of degree dividing k."""
        b = len(modulus) - 1
        if self.k % b:
            raise ValueError("subfield degree must divide k")
        h = self.pow(self.generator, (self.order - 1) // (self.p**b - 1))
        y = self.one
        for _ in range(self.p**b - 1):
            val = self.zero
            for c in reversed(modulus):
                val = self.add(self.mul(val, y), self.from_int(c))
            if not any(val):
                return y
            y = self.mul(y, h)
        raise ArithmeticError("subfield modulus has no root")


@lru_cache(maxsize=None)
def _least_irreducible(p: int, k: int) -> tuple[int, ...]:
    if k == 1:
        return (0, 1)
    for n in range(p**k):
        low = [(n // p**i) % p for i in range(k)]
        if low[0] == 0:
            continue
        if is_irreducible(low + [1], p):
            return tuple(low + [1])
    raise ArithmeticError("no irreducible polynomial found")


@lru_cache(maxsize=None)
def build_extension(p: int, k: int) -> ExtensionField:
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    return ExtensionField(p, k)


@lru_cache(maxsize=8)
def _power_table(field: ExtensionField, guard: int) -> np.ndarray:
    n = field.order - 1
    if field.order > guard:
        raise SizeGuardError(f"field of size {field.order} exceeds guard {guard}")
    p, g = field.p, field.generator
    block = min(n, 4096)
    first = np.empty((block, field.k), dtype=np.int64)
    y = field.one
    for s in range(block):
        first[s] = y
        y = field.mul(y, g)
    step = field.mul_matrix(y).T  # right-multiplication form for row vectors
    out = np.empty((n, field.k), dtype=np.int64)
    cur = first
    for start in range(0, n, block):
        stop = min(n, start + block)
        out[start:stop] = cur[: stop - start]
        cur = (cur @ step) % p
    out.setflags(write=False)
    return out


@lru_cache(maxsize=16)
def _trace_table(field: ExtensionField, guard: int) -> np.ndarray:
    t = (_power_table(field, guard) @ field.basis_traces) % field.p
    t.setflags(write=False)
    return t
