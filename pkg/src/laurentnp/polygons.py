"""Hodge and arithmetic polygons of the interval [-e, d].

Everything here is exact: ordinates are :class:`fractions.Fraction` and no
floating point is used except in the ``decimal`` column of CSV output.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "IntervalShape",
    "LowerPolygon",
    "ConvexityReport",
    "ThresholdWarning",
    "degree",
    "hodge_polygon",
    "p_unit",
    "index_pairs",
    "minimizing_pairs",
    "arithmetic_polygon",
    "blache_ferard_polygon",
    "convexity_report",
    "lies_on_or_above",
    "lower_convex_hull",
    "is_prime",
]


class ThresholdWarning(UserWarning):
    """Raised (as a warning) when p is below a theorem's size threshold."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class IntervalShape:
    """The exponent interval [-e, d] of a Laurent polynomial."""

    d: int
    e: int = 0

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d}")
        if self.e < 0:
            raise ValueError(f"e must be nonnegative, got {self.e}")

    @property
    def D(self) -> int:
        return self.d if self.e == 0 else math.lcm(self.d, self.e)

    @property
    def length(self) -> int:
        """Degree of the L-polynomial: d+e on the torus, d-1 on the line."""
        return self.d + self.e if self.e > 0 else self.d - 1

    def check_prime(self, p: int) -> None:
        if not is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if self.D % p == 0:
            raise ValueError(f"p = {p} divides D = {self.D}")

    @classmethod
    def for_prime(cls, p: int, d: int, e: int = 0) -> "IntervalShape":
        shape = cls(d, e)
        shape.check_prime(p)
        return shape


@dataclass(frozen=True)
class LowerPolygon:
    """A polygonal chain sampled at every integer abscissa 0..len."""

    ordinates: tuple[Fraction, ...]

    def __post_init__(self):
        if not self.ordinates:
            raise ValueError("a polygon needs at least the point (0, 0)")
        object.__setattr__(self, "ordinates", tuple(Fraction(h) for h in self.ordinates))
        if self.ordinates[0] != 0:
            raise ValueError("first point must be (0, 0)")

    def __len__(self) -> int:
        return len(self.ordinates) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.ordinates[k]

    @property
    def points(self) -> list[tuple[int, Fraction]]:
        return list(enumerate(self.ordinates))

    @property
    def slopes(self) -> list[Fraction]:
        h = self.ordinates
        return [h[k + 1] - h[k] for k in range(len(self))]

    @property
    def vertices(self) -> list[int]:
        """Abscissae of the endpoints and of every strict slope increase."""
        s = self.slopes
        inner = [k for k in range(1, len(self)) if s[k] > s[k - 1]]
        return sorted({0, len(self), *inner})

    def to_json(self) -> dict:
        return {
            "len": len(self),
            "points": [[k, [h.numerator, h.denominator]] for k, h in self.points],
            "vertices": self.vertices,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LowerPolygon":
        pts = sorted(obj["points"], key=lambda kv: kv[0])
        if [k for k, _ in pts] != list(range(obj["len"] + 1)):
            raise ValueError("polygon JSON must list every abscissa 0..len")
        return cls(tuple(Fraction(num, den) for _, (num, den) in pts))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "num", "den", "decimal"])
        for k, h in self.points:
            w.writerow([k, h.numerator, h.denominator, f"{float(h):.12g}"])
        return buf.getvalue()

    def __str__(self) -> str:
        return ",".join(f"({k},{h})" for k, h in self.points)


def lower_convex_hull(points: Iterable[tuple[int, Fraction]]) -> LowerPolygon:
    """Lower convex closure of integer-abscissa points, densified.

    The leftmost point must be (0, 0).  Every integer abscissa up to the
    rightmost point receives the hull's ordinate.
    """
    pts = sorted((int(k), Fraction(h)) for k, h in points)
    if not pts or pts[0] != (0, 0):
        raise ValueError("hull requires the point (0, 0) as leftmost point")
    hull: list[tuple[int, Fraction]] = []
    for pt in pts:
        if hull and hull[-1][0] == pt[0]:
            if pt[1] >= hull[-1][1]:
                continue
            hull.pop()
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            # drop the middle point unless it lies strictly below the chord
            if (y1 - y0) * (pt[0] - x0) >= (pt[1] - y0) * (x1 - x0):
                hull.pop()
            else:
                break
        hull.append(pt)
    ords: list[Fraction] = []
    for (x0, y0), (x1, y1) in zip(hull, hull[1:]):
        slope = (y1 - y0) / (x1 - x0)
        ords.extend(y0 + slope * (k - x0) for k in range(x0, x1))
    ords.append(hull[-1][1])
    return LowerPolygon(tuple(ords))


def degree(i: int, shape: IntervalShape) -> Fraction:
    if i >= 0:
        return Fraction(i, shape.d)
    if shape.e == 0:
        raise ValueError("negative exponents have no degree when e = 0")
    return Fraction(-i, shape.e)


def hodge_polygon(shape: IntervalShape) -> LowerPolygon:
    d, e = shape.d, shape.e
    if e == 0:
        return LowerPolygon(tuple(Fraction(n * (n + 1), 2 * d) for n in range(d)))
    pts = [(0, Fraction(0)), (d + e, Fraction(d + e, 2))]
    for m in range(e):
        for n in range(d):
            diff = Fraction(m, e) - Fraction(n, d)
            if -Fraction(1, e) < diff < Fraction(1, d):
                pts.append((m + n + 1, Fraction(m * (m + 1), 2 * e) + Fraction(n * (n + 1), 2 * d)))
    return lower_convex_hull(pts)


def p_unit(p: int, d: int, n: int) -> Fraction:
    """Ceiling sum sum_{i=1..n} ceil((p*i - n)/d), divided by p-1."""
    if not 0 <= n <= d:
        raise ValueError(f"n = {n} outside [0, {d}]")
    total = sum(-((n - p * i) // d) for i in range(1, n + 1))
    return Fraction(total, p - 1)


def _check_k(shape: IntervalShape, k: int) -> None:
    if shape.e == 0:
        raise ValueError("index pairs need e > 0")
    if not 1 <= k <= shape.d + shape.e - 1:
        raise ValueError(f"k = {k} outside [1, {shape.d + shape.e - 1}]")


def index_pairs(shape: IntervalShape, k: int) -> list[tuple[int, int]]:
    """The pairs (m, n) with m+n+1 = k in the closed band -1/e <= m/e - n/d <= 1/d."""
    _check_k(shape, k)
    d, e = shape.d, shape.e
    out = []
    for m in range(min(e, k)):
        n = k - 1 - m
        if not 0 <= n < d:
            continue
        # -d <= m*d - n*e <= e, cleared of denominators
        if -d <= m * d - n * e <= e:
            out.append((m, n))
    return out


def _pair_value(p: int, shape: IntervalShape, pair: tuple[int, int]) -> Fraction:
    m, n = pair
    return p_unit(p, shape.e, m) + p_unit(p, shape.d, n)


def minimizing_pairs(p: int, shape: IntervalShape, k: int) -> list[tuple[int, int]]:
    pairs = index_pairs(shape, k)
    values = [_pair_value(p, shape, pr) for pr in pairs]
    low = min(values)
    return [pr for pr, v in zip(pairs, values) if v == low]


def arithmetic_polygon(p: int, shape: IntervalShape) -> LowerPolygon:
    """Graph of p_[-e,d] through every integer abscissa, not convexified.

    For e = 0 this returns the polygon through (n, p_unit(p, d, n)),
    n = 0..d-1, i.e. the generic polygon of [0, d] for p >= 3d.
    """
    shape.check_prime(p)
    if shape.e == 0:
        return blache_ferard_polygon(p, shape.d)
    d, e = shape.d, shape.e
    ords = [Fraction(0)]
    for k in range(1, d + e):
        ords.append(min(_pair_value(p, shape, pr) for pr in index_pairs(shape, k)))
    ords.append(Fraction(d + e, 2))
    return LowerPolygon(tuple(ords))


def blache_ferard_polygon(p: int, d: int) -> LowerPolygon:
    return LowerPolygon(tuple(p_unit(p, d, n) for n in range(d)))


@dataclass(frozen=True)
class ConvexityReport:
    is_convex: bool
    vertex_abscissae: list[int]
    below_threshold: bool = False
    criterion_ok: bool | None = None
    expected_vertices: list[int] | None = field(default=None)


def convexity_report(
    poly: LowerPolygon,
    *,
    prime: int | None = None,
    shape: IntervalShape | None = None,
) -> ConvexityReport:
    """Convexity and vertex set of ``poly``.

    Pass ``prime`` and ``shape`` when ``poly`` is an arithmetic polygon: the
    vertex set is then compared with the singleton-minimizer criterion, and a
    :class:`ThresholdWarning` is issued when p <= 3D.
    """
    s = poly.slopes
    convex = all(a <= b for a, b in zip(s, s[1:]))
    verts = poly.vertices
    if prime is None or shape is None or shape.e == 0:
        return ConvexityReport(convex, verts)
    below = prime <= 3 * shape.D
    if below:
        warnings.warn(
            f"p = {prime} <= 3D = {3 * shape.D}: convexity is not guaranteed",
            ThresholdWarning,
            stacklevel=2,
        )
    n = shape.d + shape.e
    expected = sorted(
        {0, n} | {k for k in range(1, n) if len(minimizing_pairs(prime, shape, k)) == 1}
    )
    return ConvexityReport(convex, verts, below, verts == expected, expected)


def lies_on_or_above(upper: LowerPolygon, lower: LowerPolygon) -> bool:
    if len(upper) != len(lower):
        raise ValueError(f"length mismatch: {len(upper)} vs {len(lower)}")
    return all(a >= b for a, b in zip(upper.ordinates, lower.ordinates))


def polygon_from_ordinates(values: Sequence) -> LowerPolygon:
    return LowerPolygon(tuple(Fraction(v) for v in values))


def dumps_polygon(poly: LowerPolygon) -> str:
    return json.dumps(poly.to_json(), sort_keys=True)
