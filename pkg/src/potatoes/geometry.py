"""Exact planar primitives on rational coordinates.

Points live on :class:`fractions.Fraction` coordinates so every predicate
(orientation, in-circle, direction order) is decided exactly.  Angles are
kept as exact direction vectors plus a whole-turn counter; real-valued
bounds are produced on demand with rigorous interval arithmetic (mpmath's
``iv`` context).
"""
from __future__ import annotations

import enum
import math
import random
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import gcd
from typing import Iterable, Sequence, Union

import numpy as np
from mpmath import iv, libmp

Number = Union[int, Fraction]

DEFAULT_PRECISION_BITS = 64
# Refinement stops once an interval is narrower than 2**-80.
MAX_PRECISION_BITS = 1024

_precision_bits = DEFAULT_PRECISION_BITS


@contextmanager
def _ivprec(bits: int):
    old = iv.prec
    iv.prec = max(int(bits), old)
    try:
        yield
    finally:
        iv.prec = old


def set_precision_bits(bits: int) -> None:
    """Set the working precision used for interval-valued results."""
    global _precision_bits
    if bits < 16:
        raise ValueError("precision must be at least 16 bits")
    _precision_bits = int(bits)


def get_precision_bits() -> int:
    return _precision_bits


class GeometryError(Exception):
    pass


class DegenerateTriangle(GeometryError):
    pass


class DegenerateCircle(GeometryError):
    pass


class EmptyInput(GeometryError):
    pass


class NotConvex(GeometryError):
    pass


class AmbiguousAtPrecision(GeometryError):
    """An interval comparison stayed undecided at the maximum precision."""


class Orientation(enum.IntEnum):
    RIGHT = -1
    STRAIGHT = 0
    LEFT = 1


class CirclePosition(enum.IntEnum):
    INSIDE = 1
    ON_CIRCLE = 0
    OUTSIDE = -1


class Containment(enum.Enum):
    STRICTLY_INSIDE = "inside"
    ON_BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True, order=True)
class Point:
    """Exact rational point; ordering is lexicographic on ``(x, y)``."""

    x: Fraction
    y: Fraction

    def __post_init__(self):
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))

    def __sub__(self, other: "Point") -> tuple[Fraction, Fraction]:
        return (self.x - other.x, self.y - other.y)

    def __iter__(self):
        yield self.x
        yield self.y

    def __repr__(self) -> str:
        return f"Point({self.x}, {self.y})"


def as_point(p) -> Point:
    return p if isinstance(p, Point) else Point(p[0], p[1])


def cross(o: Point, a: Point, b: Point) -> Fraction:
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def orientation(a: Point, b: Point, c: Point) -> Orientation:
    """Sign of ``(b - a) x (c - a)``."""
    return Orientation(_sign(cross(a, b, c)))


# ----------------------------------------------------------------------------
# Intervals


@dataclass(frozen=True)
class Interval:
    """Closed interval with rational endpoints."""

    lo: Fraction
    hi: Fraction

    @classmethod
    def exact(cls, v) -> "Interval":
        v = Fraction(v)
        return cls(v, v)

    @classmethod
    def from_iv(cls, x) -> "Interval":
        a, b = x._mpi_
        return cls(Fraction(*map(int, libmp.to_rational(a))),
                   Fraction(*map(int, libmp.to_rational(b))))

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return float((self.lo + self.hi) / 2)

    def __contains__(self, v) -> bool:
        return self.lo <= v <= self.hi

    def __float__(self) -> float:
        return self.mid

    def __repr__(self) -> str:
        return f"Interval({float(self.lo):.17g}, {float(self.hi):.17g})"


def to_iv(v):
    """Rigorous ``iv`` enclosure of a rational, float or Interval."""
    if isinstance(v, Interval):
        return iv.mpf([to_iv(v.lo).a, to_iv(v.hi).b])
    if isinstance(v, float):
        return iv.mpf(v)
    v = Fraction(v)
    if v.denominator == 1:
        return iv.mpf(v.numerator)
    return iv.mpf(v.numerator) / iv.mpf(v.denominator)


# ----------------------------------------------------------------------------
# Directions and angles


def _int_vector(dx, dy) -> tuple[int, int]:
    dx, dy = Fraction(dx), Fraction(dy)
    den = dx.denominator * dy.denominator // gcd(dx.denominator, dy.denominator)
    x, y = int(dx * den), int(dy * den)
    g = gcd(x, y)
    return x // g, y // g


def _half(x, y) -> int:
    """0 for directions with argument in [0, pi), 1 for [pi, 2 pi)."""
    return 0 if (y > 0 or (y == 0 and x > 0)) else 1


def _cmp_arg(ax, ay, bx, by) -> int:
    """Compare arguments in [0, 2 pi) of two nonzero vectors."""
    ha, hb = _half(ax, ay), _half(bx, by)
    if ha != hb:
        return -1 if ha < hb else 1
    c = ax * by - ay * bx
    return -_sign(c)


@dataclass(frozen=True)
class Direction:
    """A direction in the plane; equal to every positive multiple of itself."""

    dx: Fraction
    dy: Fraction
    _key: tuple[int, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        dx, dy = Fraction(self.dx), Fraction(self.dy)
        if dx == 0 and dy == 0:
            raise ValueError("zero vector has no direction")
        object.__setattr__(self, "dx", dx)
        object.__setattr__(self, "dy", dy)
        object.__setattr__(self, "_key", _int_vector(dx, dy))

    @classmethod
    def between(cls, a: Point, b: Point) -> "Direction":
        return cls(b.x - a.x, b.y - a.y)

    def __eq__(self, other) -> bool:
        return isinstance(other, Direction) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __neg__(self) -> "Direction":
        return Direction(-self.dx, -self.dy)

    def angle(self) -> "Angle":
        """Counterclockwise angle from the positive x axis, in [0, 2 pi)."""
        return Angle(self.dx, self.dy)

    def rotated(self, a: "Angle") -> "Direction":
        x, y = a.vector
        return Direction(self.dx * x - self.dy * y, self.dx * y + self.dy * x)


def compare_directions(u: Direction, v: Direction) -> "Angle":
    """Exact counterclockwise rotation carrying ``u`` onto ``v``, in [0, 2 pi)."""
    return Angle(u.dx * v.dx + u.dy * v.dy, u.dx * v.dy - u.dy * v.dx)


def direction_sort_key(ref: Direction | None = None):
    """Key sorting directions counterclockwise starting at ``ref`` (default +x)."""
    rx, ry = (1, 0) if ref is None else ref._key

    def cmp(a, b):
        ax, ay = _rel(a, rx, ry)
        bx, by = _rel(b, rx, ry)
        return _cmp_arg(ax, ay, bx, by)

    return cmp_to_key(cmp)


def _rel(d, rx, ry):
    x, y = d._key if isinstance(d, Direction) else d
    return (rx * x + ry * y, rx * y - ry * x)


@dataclass(frozen=True)
class Angle:
    """Exact real angle ``turns * 2 pi + arg(vector)``.

    Addition multiplies the (unnormalised) vectors, so sums and differences of
    angles between rational vectors stay exact.  Real bounds come from
    :meth:`bounds`.
    """

    dx: Fraction
    dy: Fraction
    turns: int = 0

    def __post_init__(self):
        x, y = _int_vector(self.dx, self.dy) if (self.dx or self.dy) else (0, 0)
        if x == 0 and y == 0:
            raise ValueError("angle vector must be nonzero")
        object.__setattr__(self, "dx", x)
        object.__setattr__(self, "dy", y)

    @property
    def vector(self) -> tuple[int, int]:
        return (self.dx, self.dy)

    @classmethod
    def zero(cls) -> "Angle":
        return cls(1, 0)

    @classmethod
    def half_turn(cls) -> "Angle":
        return cls(-1, 0)

    @classmethod
    def quarter_turn(cls) -> "Angle":
        return cls(0, 1)

    @classmethod
    def full_turn(cls) -> "Angle":
        return cls(1, 0, 1)

    def __add__(self, other: "Angle") -> "Angle":
        ax, ay = self.vector
        bx, by = other.vector
        rx, ry = ax * bx - ay * by, ax * by + ay * bx
        wrap = 1 if _cmp_arg(rx, ry, ax, ay) < 0 else 0
        return Angle(rx, ry, self.turns + other.turns + wrap)

    def __neg__(self) -> "Angle":
        if self.dy == 0 and self.dx > 0:
            return Angle(self.dx, 0, -self.turns)
        return Angle(self.dx, -self.dy, -self.turns - 1)

    def __sub__(self, other: "Angle") -> "Angle":
        return self + (-other)

    def __mul__(self, k: int) -> "Angle":
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return (-self) * (-k)
        result, base = Angle.zero(), self
        while k:
            if k & 1:
                result = result + base
            k >>= 1
            if k:
                base = base + base
        return result

    __rmul__ = __mul__

    def _cmp(self, other: "Angle") -> int:
        if self.turns != other.turns:
            return -1 if self.turns < other.turns else 1
        return _cmp_arg(self.dx, self.dy, other.dx, other.dy)

    def __eq__(self, other) -> bool:
        return isinstance(other, Angle) and self._cmp(other) == 0

    def __hash__(self) -> int:
        return hash((self.turns, self.dx, self.dy))

    def __lt__(self, other: "Angle") -> bool:
        return self._cmp(other) < 0

    def __le__(self, other: "Angle") -> bool:
        return self._cmp(other) <= 0

    def __gt__(self, other: "Angle") -> bool:
        return self._cmp(other) > 0

    def __ge__(self, other: "Angle") -> bool:
        return self._cmp(other) >= 0

    def to_iv(self, bits: int | None = None):
        bits = bits or _precision_bits
        with _ivprec(bits + 8):
            a = iv.atan2(iv.mpf(self.dy), iv.mpf(self.dx))
            if self.dy < 0:
                a = a + 2 * iv.pi
            return a + 2 * iv.pi * self.turns

    def bounds(self, bits: int | None = None) -> Interval:
        return Interval.from_iv(self.to_iv(bits))

    @property
    def lo(self) -> Fraction:
        return self.bounds().lo

    @property
    def hi(self) -> Fraction:
        return self.bounds().hi

    @property
    def radians(self) -> float:
        shift = max(0, max(abs(self.dx).bit_length(), abs(self.dy).bit_length()) - 900)
        a = math.atan2(self.dy >> shift, self.dx >> shift)
        if a < 0:
            a += 2 * math.pi
        return a + 2 * math.pi * self.turns

    def compare_real(self, value) -> int:
        """Sign of ``self - value`` for a float/rational/iv ``value``.

        Refines precision until the intervals separate; raises
        :class:`AmbiguousAtPrecision` past the maximum precision.
        """
        bits = _precision_bits
        while True:
            with _ivprec(bits + 8):
                mine = self.to_iv(bits)
                theirs = value if hasattr(value, "_mpi_") else to_iv(value)
                if mine.a > theirs.b:
                    return 1
                if mine.b < theirs.a:
                    return -1
            if bits >= MAX_PRECISION_BITS:
                raise AmbiguousAtPrecision(f"cannot order angle {self!r} against {value!r}")
            bits = min(MAX_PRECISION_BITS, bits * 2)

    def __repr__(self) -> str:
        return f"Angle({self.radians:.12g} rad)"


def angle_between(u: Sequence, v: Sequence) -> Angle:
    """Unsigned angle in [0, pi] between two nonzero vectors."""
    dot = u[0] * v[0] + u[1] * v[1]
    crs = u[0] * v[1] - u[1] * v[0]
    return Angle(dot, abs(crs))


def triangle_angles(a: Point, b: Point, c: Point) -> tuple[Angle, Angle, Angle]:
    if orientation(a, b, c) == Orientation.STRAIGHT:
        raise DegenerateTriangle(f"collinear triangle {a}, {b}, {c}")
    return (angle_between(b - a, c - a), angle_between(c - b, a - b),
            angle_between(a - c, b - c))


def min_angle(a: Point, b: Point, c: Point) -> Angle:
    """Smallest interior angle of triangle ``abc`` (exact; bounds on demand)."""
    return min(triangle_angles(a, b, c))


def floor_ratio(total: Angle, step: Angle) -> int:
    """Largest ``c`` with ``c * step <= total`` (exact)."""
    c = 0
    acc = step
    while acc <= total:
        c += 1
        acc = acc + step
    return c


def ceil_ratio(total: Angle, step: Angle) -> int:
    """Smallest ``c`` with ``c * step >= total`` (exact)."""
    c, acc = 0, Angle.zero()
    while acc < total:
        c += 1
        acc = acc + step
    return c


# ----------------------------------------------------------------------------
# Circles


@dataclass(frozen=True)
class Circle:
    """Circle with rational or interval center and squared radius."""

    cx: Union[Fraction, Interval]
    cy: Union[Fraction, Interval]
    radius_squared: Union[Fraction, Interval]
    support: tuple = ()

    @property
    def exact(self) -> bool:
        return not isinstance(self.radius_squared, Interval)

    @property
    def center(self):
        return (self.cx, self.cy)

    def radius_iv(self, bits: int | None = None):
        with _ivprec((bits or _precision_bits) + 8):
            return iv.sqrt(to_iv(self.radius_squared))

    def contains(self, p: Point) -> bool:
        """Closed-disk membership; exact for rational circles."""
        if not self.exact:
            raise TypeError("exact membership needs a rational circle")
        return (p.x - self.cx) ** 2 + (p.y - self.cy) ** 2 <= self.radius_squared


def in_circle(a: Point, b: Point, c: Point, d: Point) -> CirclePosition:
    """Position of ``d`` relative to the circle through ``a, b, c``."""
    o = orientation(a, b, c)
    if o == Orientation.STRAIGHT:
        raise DegenerateCircle("in_circle needs three non-collinear points")
    adx, ady = a.x - d.x, a.y - d.y
    bdx, bdy = b.x - d.x, b.y - d.y
    cdx, cdy = c.x - d.x, c.y - d.y
    det = ((adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
           - (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady)
           + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady))
    return CirclePosition(_sign(det) * int(o))


def circumcircle(a: Point, b: Point, c: Point) -> Circle:
    d = 2 * cross(a, b, c)
    if d == 0:
        raise DegenerateCircle("collinear points have no circumcircle")
    bx, by = b.x - a.x, b.y - a.y
    cx, cy = c.x - a.x, c.y - a.y
    b2, c2 = bx * bx + by * by, cx * cx + cy * cy
    ux = (cy * b2 - by * c2) / d
    uy = (bx * c2 - cx * b2) / d
    return Circle(a.x + ux, a.y + uy, ux * ux + uy * uy, (a, b, c))


def _diameter_circle(a: Point, b: Point) -> Circle:
    cx, cy = (a.x + b.x) / 2, (a.y + b.y) / 2
    return Circle(cx, cy, (a.x - cx) ** 2 + (a.y - cy) ** 2, (a, b))


def _covers(c: Circle, p: Point) -> bool:
    return (p.x - c.cx) ** 2 + (p.y - c.cy) ** 2 <= c.radius_squared


def _circle_three(a: Point, b: Point, c: Point) -> Circle:
    if orientation(a, b, c) == Orientation.STRAIGHT:
        pairs = [(a, b), (a, c), (b, c)]
        far = max(pairs, key=lambda pq: (pq[0].x - pq[1].x) ** 2 + (pq[0].y - pq[1].y) ** 2)
        return _diameter_circle(*far)
    return circumcircle(a, b, c)


def smallest_enclosing_circle(points: Iterable) -> Circle:
    """Minimum enclosing circle, exact (randomised incremental, fixed seed)."""
    pts = sorted(set(as_point(p) for p in points))
    if not pts:
        raise EmptyInput("no points")
    random.Random(0x5EC).shuffle(pts)
    c = Circle(pts[0].x, pts[0].y, Fraction(0), (pts[0],))
    for i, p in enumerate(pts):
        if _covers(c, p):
            continue
        c = Circle(p.x, p.y, Fraction(0), (p,))
        for j in range(i):
            q = pts[j]
            if _covers(c, q):
                continue
            c = _diameter_circle(p, q)
            for k in range(j):
                r = pts[k]
                if not _covers(c, r):
                    c = _circle_three(p, q, r)
    return c


def _is_rational_sqrt(v: Fraction) -> Fraction | None:
    n, d = v.numerator, v.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def strip_straight(poly: Sequence[Point]) -> list[Point]:
    """Drop vertices where the boundary goes straight on."""
    n = len(poly)
    out = [poly[i] for i in range(n)
           if orientation(poly[i - 1], poly[i], poly[(i + 1) % n]) != Orientation.STRAIGHT]
    return out


def check_convex(poly: Sequence[Point]) -> list[Point]:
    """Return the corner vertices of a weakly convex CCW polygon or raise."""
    corners = strip_straight(list(poly))
    if len(corners) < 3:
        raise NotConvex("polygon has fewer than three corners")
    m = len(corners)
    for i in range(m):
        if orientation(corners[i - 1], corners[i], corners[(i + 1) % m]) != Orientation.LEFT:
            raise NotConvex("polygon is not convex and counterclockwise")
    # A left-turning cycle must also wind exactly once.
    turning = Angle.zero()
    for i in range(m):
        a, b, c = corners[i - 1], corners[i], corners[(i + 1) % m]
        turning = turning + compare_directions(Direction.between(a, b), Direction.between(b, c))
    if turning != Angle.full_turn():
        raise NotConvex("polygon winds more than once")
    return corners


def largest_inscribed_circle(polygon: Sequence[Point], bits: int | None = None) -> Circle:
    """Chebyshev center of a convex CCW polygon.

    The optimum sits where three edge constraints are tight.  Candidate
    triples are screened in floating point; the winners are re-solved exactly
    when the three edge lengths are rational, otherwise with interval
    arithmetic.
    """
    corners = check_convex([as_point(p) for p in polygon])
    m = len(corners)
    rows = []
    for i in range(m):
        p, q = corners[i], corners[(i + 1) % m]
        dx, dy = q.x - p.x, q.y - p.y
        rows.append((-dy, dx, dy * p.x - dx * p.y, dx * dx + dy * dy))
    A = np.array([[float(a), float(b), -math.sqrt(float(l2))] for a, b, _, l2 in rows])
    rhs = np.array([-float(c) for _, _, c, _ in rows])
    scale = np.abs(A).max()
    tri = np.array([t for t in _triples(m)])
    M = A[tri]
    dets = np.linalg.det(M)
    ok = np.abs(dets) > 1e-12 * scale ** 3
    tri, M = tri[ok], M[ok]
    sol = np.linalg.solve(M, rhs[tri][..., None])[..., 0]
    slack = sol @ A.T - rhs
    feasible = (slack >= -1e-9 * scale * (1 + np.abs(sol).max(axis=1, keepdims=True))).all(axis=1)
    if not feasible.any():
        raise NotConvex("no feasible inscribed circle")
    r = np.where(feasible, sol[:, 2], -np.inf)
    best = r.max()
    picks = tri[r >= best - 1e-9 * max(1.0, abs(best))]
    circles = [_solve_chebyshev([rows[i] for i in t], bits) for t in picks]
    return max(circles, key=lambda c: float(c.radius_squared) if c.exact else c.radius_squared.lo)


def _triples(m):
    for i in range(m):
        for j in range(i + 1, m):
            for k in range(j + 1, m):
                yield (i, j, k)


def _solve_chebyshev(rows, bits):
    lengths = [_is_rational_sqrt(Fraction(l2)) for *_, l2 in rows]
    if all(l is not None for l in lengths):
        m = [[Fraction(a), Fraction(b), -l] for (a, b, _, _), l in zip(rows, lengths)]
        rhs = [-Fraction(c) for _, _, c, _ in rows]
        cx, cy, r = _cramer(m, rhs)
        return Circle(cx, cy, r * r)
    with _ivprec((bits or _precision_bits) + 16):
        m = [[to_iv(a), to_iv(b), -iv.sqrt(to_iv(l2))] for a, b, _, l2 in rows]
        rhs = [-to_iv(c) for _, _, c, _ in rows]
        cx, cy, r = _cramer(m, rhs)
        return Circle(Interval.from_iv(cx), Interval.from_iv(cy), Interval.from_iv(r * r))


def _det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def _cramer(m, rhs):
    d = _det3(m)
    out = []
    for col in range(3):
        mc = [[rhs[r] if c == col else m[r][c] for c in range(3)] for r in range(3)]
        out.append(_det3(mc) / d)
    return out


def point_in_convex_polygon(p: Point, polygon: Sequence[Point]) -> Containment:
    """Classify ``p`` against a weakly convex CCW polygon."""
    n = len(polygon)
    on_line = False
    for i in range(n):
        o = orientation(polygon[i], polygon[(i + 1) % n], p)
        if o == Orientation.RIGHT:
            return Containment.OUTSIDE
        if o == Orientation.STRAIGHT:
            on_line = True
    return Containment.ON_BOUNDARY if on_line else Containment.STRICTLY_INSIDE


def convex_hull(points: Iterable[Point]) -> list[Point]:
    """Corners of the convex hull in CCW order (monotone chain)."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower, upper = half(pts), half(reversed(pts))
    return lower[:-1] + upper[:-1]


def polygon_area2(poly: Sequence[Point]) -> Fraction:
    """Twice the signed area."""
    n = len(poly)
    return sum((poly[i].x * poly[(i + 1) % n].y - poly[(i + 1) % n].x * poly[i].y
                for i in range(n)), Fraction(0))


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Closed segments ``ab`` and ``cd`` share at least one point."""
    o1, o2 = orientation(a, b, c), orientation(a, b, d)
    o3, o4 = orientation(c, d, a), orientation(c, d, b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    return ((o1 == 0 and on_segment(a, b, c)) or (o2 == 0 and on_segment(a, b, d))
            or (o3 == 0 and on_segment(c, d, a)) or (o4 == 0 and on_segment(c, d, b)))


def on_segment(a: Point, b: Point, p: Point) -> bool:
    """``p`` (known collinear with ``ab``) lies on the closed segment."""
    return min(a.x, b.x) <= p.x <= max(a.x, b.x) and min(a.y, b.y) <= p.y <= max(a.y, b.y)
