"""Extremal mesh constructions.

Each generator returns ``(mesh, meta)`` where ``meta`` records the family,
the parameters and the counts the construction is designed to reach.  The
same dictionary is stored as ``mesh.meta``.

Irrational coordinates (circle points, regular polygons) are rounded to
dyadic rationals with denominator ``2**60``.  Everything built on top of
those base points (line intersections, lattice points, perpendicular
bisectors) is computed exactly, so collinearities the counting arguments rely
on survive the rounding.
"""
from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath

from .geometry import Orientation, Point, orientation
from .mesh import Mesh, validate

SNAP_BITS = 60


class InvalidDelta(ValueError):
    pass


class ValidationFailed(RuntimeError):
    pass


@dataclass
class ConstructionMeta:
    family: str
    params: dict
    predicted: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _snap(v) -> Fraction:
    with mpmath.workprec(SNAP_BITS + 64):
        return Fraction(int(mpmath.nint(mpmath.mpf(v) * (1 << SNAP_BITS))), 1 << SNAP_BITS)


def _unit(theta) -> Point:
    with mpmath.workprec(SNAP_BITS + 64):
        return Point(_snap(mpmath.cos(theta)), _snap(mpmath.sin(theta)))


def _unit_pi(x: Fraction) -> Point:
    """Unit vector at angle ``pi * x``; exact at multiples of ``pi / 2``."""
    with mpmath.workprec(SNAP_BITS + 64):
        x = mpmath.mpf(x.numerator) / x.denominator
        return Point(_snap(mpmath.cospi(x)), _snap(mpmath.sinpi(x)))


def _floor_tol(x: float) -> int:
    # 2*pi/delta is often an integer up to float rounding (delta = 2*pi/15 ...).
    return math.floor(x + 1e-9)


class _Builder:
    """Collects vertices (deduplicated by exact coordinates) and CCW triangles."""

    def __init__(self):
        self.index: dict[Point, int] = {}
        self.points: list[Point] = []
        self.triangles: list[tuple[int, int, int]] = []

    def add(self, p: Point) -> int:
        i = self.index.get(p)
        if i is None:
            i = self.index[p] = len(self.points)
            self.points.append(p)
        return i

    def tri(self, a: Point, b: Point, c: Point) -> int:
        ids = [self.add(a), self.add(b), self.add(c)]
        o = orientation(a, b, c)
        if o == Orientation.STRAIGHT:
            raise ValidationFailed(f"degenerate triangle {a}, {b}, {c}")
        if o == Orientation.RIGHT:
            ids[1], ids[2] = ids[2], ids[1]
        self.triangles.append(tuple(ids))
        return len(self.triangles) - 1

    def mesh(self, meta: ConstructionMeta) -> tuple[Mesh, ConstructionMeta]:
        m = Mesh(self.points, self.triangles, meta.to_dict())
        report = validate(m)
        if not report.ok:
            raise ValidationFailed(f"{meta.family} produced an invalid mesh: {report.violations[:3]}")
        return m, meta


def _lerp(a: Point, b: Point, f: Fraction) -> Point:
    return Point(a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f)


def _affine(o: Point, a: Point, b: Point, i: int, j: int, n: int) -> Point:
    return Point(o.x + (a.x - o.x) * Fraction(i, n) + (b.x - o.x) * Fraction(j, n),
                 o.y + (a.y - o.y) * Fraction(i, n) + (b.y - o.y) * Fraction(j, n))


def _lattice_triangle(bld: _Builder, o: Point, a: Point, b: Point, n: int) -> None:
    """Split triangle ``oab`` into ``n*n`` similar triangles."""
    for i in range(n):
        for j in range(n - i):
            bld.tri(_affine(o, a, b, i, j, n), _affine(o, a, b, i + 1, j, n), _affine(o, a, b, i, j + 1, n))
            if i + j <= n - 2:
                bld.tri(_affine(o, a, b, i + 1, j, n), _affine(o, a, b, i + 1, j + 1, n),
                        _affine(o, a, b, i, j + 1, n))


def _lattice_parallelogram(bld: _Builder, o: Point, a: Point, b: Point, n: int) -> None:
    """Grid on parallelogram ``o, a, a+b-o, b``; cells cut along the o-diagonal."""
    for i in range(n):
        for j in range(n):
            p00 = _affine(o, a, b, i, j, n)
            p11 = _affine(o, a, b, i + 1, j + 1, n)
            bld.tri(p00, _affine(o, a, b, i + 1, j, n), p11)
            bld.tri(p00, p11, _affine(o, a, b, i, j + 1, n))


def _line_intersection(p: Point, d: tuple, q: Point, e: tuple) -> Point:
    """Intersection of ``p + s d`` and ``q + t e``."""
    den = d[0] * e[1] - d[1] * e[0]
    if den == 0:
        raise ValidationFailed("parallel construction lines")
    s = ((q.x - p.x) * e[1] - (q.y - p.y) * e[0]) / den
    return Point(p.x + s * d[0], p.y + s * d[1])


# ----------------------------------------------------------------------------
# Half-circle groups


def gen_halfcircle(g: int, group_size: int = 17) -> tuple[Mesh, ConstructionMeta]:
    """``g`` groups of ``group_size`` points on the upper half circle.

    Points run clockwise from ``v0 = (-1, 0)`` to ``v_{n-1} = (1, 0)``.  Each
    group is triangulated by repeatedly joining the end points of a range to
    its midpoint, so the group's dual is a perfectly balanced binary tree.
    The polygon of group end points below the chords is fanned from ``v0``.
    """
    from .growth import eval_N

    if g < 1:
        raise ValueError("need at least one group")
    depth = (group_size - 1).bit_length() - 1
    if group_size < 3 or (1 << depth) + 1 != group_size:
        raise ValueError("group size must be 2**k + 1 with k >= 1")
    span = group_size - 1
    n = span * g + 1
    pts = [_unit_pi(1 - Fraction(i, n - 1)) for i in range(n)]
    bld = _Builder()
    for p in pts:
        bld.add(p)

    def split(a: int, b: int):
        if b - a < 2:
            return
        mid = (a + b) // 2
        bld.tri(pts[a], pts[mid], pts[b])
        split(a, mid)
        split(mid, b)

    for j in range(g):
        split(j * span, (j + 1) * span)
    group_triangles = len(bld.triangles)
    for j in range(1, g):
        bld.tri(pts[0], pts[j * span], pts[(j + 1) * span])
    per_group = eval_N(depth)
    meta = ConstructionMeta(
        "HalfCircle",
        {"g": g, "group_size": group_size, "n": n},
        [["convex_paths_v0_vlast_group_edges", per_group ** g, "exact"],
         ["convex_paths_per_group", per_group, "exact"]],
        {"group_triangle_count": group_triangles, "span": span},
    )
    return bld.mesh(meta)


def halfcircle_group_edges(mesh: Mesh) -> set[tuple[int, int]]:
    """Edges of the group triangulations (excluding the fan below the chords)."""
    from .mesh import edge_key

    count = mesh.meta["extra"]["group_triangle_count"]
    out = set()
    for a, b, c in mesh.triangles[:count]:
        out.update({edge_key(a, b), edge_key(b, c), edge_key(c, a)})
    return out


# ----------------------------------------------------------------------------
# Fat ring


def gen_fat_ring(delta: float, l: int) -> tuple[Mesh, ConstructionMeta]:
    """Nested regular ``k``-gon rings, ``k = floor(2 pi / delta)``.

    ``Q_1`` has apothem ``l - 1``; the copies ``Q_1 .. Q_l`` are spaced evenly
    out to ``Q' = Q_l``.  The annulus decomposes into one star triangle over
    each edge of ``Q_1`` (sliced by the parallel ring edges) and one
    parallelogram per corner (the grid of two extended edge families).  Star
    triangles, corner parallelograms and the ``k`` centre triangles of
    ``Q_1`` are all subdivided into ``l - 1`` lattice rows.
    """
    if not 0 < delta <= 2 * math.pi / 5 + 1e-12:
        raise InvalidDelta("fat ring needs 0 < delta <= 2 pi / 5")
    k = _floor_tol(2 * math.pi / delta)
    if k < 5:
        raise InvalidDelta(f"k = {k} is too small")
    if l < 2:
        raise ValueError("need at least two rings")
    n_sub = l - 1
    a = Fraction(n_sub)
    normals = [_unit_pi(Fraction(2 * i, k)) for i in range(k)]

    def line(i):
        u = normals[i % k]
        foot = Point(u.x * a, u.y * a)
        return foot, (-u.y, u.x)

    corners = []  # c_i = L_i ∩ L_{i+1}
    for i in range(k):
        p, d = line(i)
        q, e = line(i + 1)
        corners.append(_line_intersection(p, d, q, e))
    stars = []  # s_i = L_{i-1} ∩ L_{i+1}
    for i in range(k):
        p, d = line(i - 1)
        q, e = line(i + 1)
        stars.append(_line_intersection(p, d, q, e))
    origin = Point(0, 0)
    bld = _Builder()
    for i in range(k):
        c_prev, c = corners[i - 1], corners[i]
        _lattice_triangle(bld, origin, c_prev, c, n_sub)
        _lattice_triangle(bld, c_prev, c, stars[i], n_sub)
        _lattice_parallelogram(bld, c, stars[(i + 1) % k], stars[i], n_sub)
    meta = ConstructionMeta(
        "FatRing",
        {"delta": delta, "l": l, "k": k},
        [["potatoes", l ** k, "lower_bound"],
         ["vertex_budget", Fraction(3, 2) * k * l * l, "leading_term"]],
        {"n": len(bld.points)},
    )
    meta.predicted[1][1] = str(meta.predicted[1][1])
    return bld.mesh(meta)


# ----------------------------------------------------------------------------
# Carrot towers


def _tower(bld: _Builder, pa: Point, pb: Point, apex: Point, cells: int) -> list[int]:
    """Peel ``cells - 1`` isosceles triangles off ``(pa, pb, apex)``.

    ``pa`` carries the small angle and ``pb`` twice that; each peel cuts
    along the perpendicular bisector of the current base, which keeps the
    remainder similar to the original.
    """
    made = []
    for _ in range(cells - 1):
        mid = Point((pa.x + pb.x) / 2, (pa.y + pb.y) / 2)
        normal = (-(pb.y - pa.y), pb.x - pa.x)
        d = _line_intersection(pa, (apex.x - pa.x, apex.y - pa.y), mid, normal)
        made.append(bld.tri(pa, pb, d))
        pa, pb = pb, d
    made.append(bld.tri(pa, pb, apex))
    return made


def gen_carrot_towers(delta: float, t: int) -> tuple[Mesh, ConstructionMeta]:
    """Regular ``k``-gon with a tower of ``t`` triangles on every side.

    ``k = floor(2 pi / (3 delta))``.  Each tower is a ``delta, 2 delta,
    pi - 3 delta`` triangle split into ``t - 1`` ``delta, delta, pi - 2 delta``
    cells plus a similar cap.  The polygon itself is fanned from one corner
    so it contains no interior vertex.
    """
    if not 0 < delta <= 2 * math.pi / 9 + 1e-12:
        raise InvalidDelta("carrot towers need 0 < delta <= 2 pi / 9")
    k = _floor_tol(2 * math.pi / (3 * delta))
    if k < 3:
        raise InvalidDelta(f"k = {k} is too small")
    if t < 1:
        raise ValueError("towers need at least one triangle")
    radius = 8
    corners = []
    for i in range(k):
        u = _unit_pi(Fraction(2 * i, k) + Fraction(1, 2))
        corners.append(Point(u.x * radius, u.y * radius))
    # Outgoing tower side at the "delta" end and the "2 delta" end of each edge.
    side_a, side_b = [], []
    with mpmath.workprec(SNAP_BITS + 64):
        for i in range(k):
            a, b = corners[i], corners[(i + 1) % k]
            ang = mpmath.atan2(float(b.y - a.y), float(b.x - a.x))
            da = _unit(ang - delta)
            db = _unit(ang + mpmath.pi + 2 * delta)
            side_a.append((da.x, da.y))
            side_b.append((db.x, db.y))
    straight = abs(3 * delta - 2 * math.pi / k) < 1e-9
    if straight:
        # The boundary is exactly straight at every polygon corner.
        for i in range(k):
            da = side_a[(i + 1) % k]
            side_b[i] = (-da[0], -da[1])
    bld = _Builder()
    if k == 3:
        bld.tri(*corners)
    else:
        for i in range(1, k - 1):
            bld.tri(corners[0], corners[i], corners[i + 1])
    for i in range(k):
        a, b = corners[i], corners[(i + 1) % k]
        apex = _line_intersection(a, side_a[i], b, side_b[i])
        _tower(bld, a, b, apex, t)
    meta = ConstructionMeta(
        "CarrotTowers",
        {"delta": delta, "t": t, "k": k},
        [["carrots", t ** k, "lower_bound"],
         ["carrots_all_prefixes", (t + 1) ** k, "lower_bound"]],
        {"n": len(bld.points), "straight_corners": straight},
    )
    return bld.mesh(meta)


# ----------------------------------------------------------------------------
# Grid strip


def grid_strip_carrots(m: int) -> int:
    """Carrots of the 2 x m strip: every run of consecutive triangles."""
    t = 2 * (m - 1)
    return t * (t + 1) // 2


def gen_grid_strip(m: int) -> tuple[Mesh, ConstructionMeta]:
    """2 x m integer grid; every unit square split by its rising diagonal."""
    if m < 2:
        raise ValueError("grid strip needs m >= 2")
    bld = _Builder()
    for y in (0, 1):
        for x in range(m):
            bld.add(Point(x, y))
    for x in range(m - 1):
        bld.tri(Point(x, 0), Point(x + 1, 1), Point(x, 1))
        bld.tri(Point(x, 0), Point(x + 1, 0), Point(x + 1, 1))
    meta = ConstructionMeta(
        "GridStrip",
        {"m": m, "n": 2 * m},
        [["carrots", grid_strip_carrots(m), "exact"]],
    )
    return bld.mesh(meta)


# ----------------------------------------------------------------------------
# Perturbation


def _straight_vertices(mesh: Mesh) -> int:
    ic = mesh.int_coords
    count = 0
    for v, nbrs in enumerate(mesh.neighbors):
        x0, y0 = ic[v]
        vecs = [(ic[w][0] - x0, ic[w][1] - y0) for w in nbrs]
        if any(a[0] * b[1] == a[1] * b[0] and a[0] * b[0] + a[1] * b[1] < 0
               for i, a in enumerate(vecs) for b in vecs[i + 1:]):
            count += 1
    return count


def perturb(mesh: Mesh, magnitude, seed: int = 0) -> Mesh:
    """Move every interior vertex by a seeded rational offset of size <= magnitude.

    The result is re-validated; the number of vertices with a straight pair
    of incident edges before and after is stored in ``meta['collinearity']``.
    """
    magnitude = Fraction(magnitude)
    if magnitude < 0:
        raise ValueError("magnitude must be nonnegative")
    rng = random.Random(seed)
    res = 1 << 20
    boundary = mesh.boundary_vertices
    verts = []
    for i, p in enumerate(mesh.vertices):
        if magnitude == 0 or i in boundary:
            verts.append(p)
            continue
        dx = Fraction(rng.randint(-res, res), res) * magnitude
        dy = Fraction(rng.randint(-res, res), res) * magnitude
        verts.append(Point(p.x + dx, p.y + dy))
    meta = dict(mesh.meta)
    out = Mesh(verts, mesh.triangles, meta)
    report = validate(out)
    if not report.ok:
        raise ValidationFailed(f"perturbation broke the mesh: {sorted(report.kinds())}")
    out.meta["collinearity"] = {"before": _straight_vertices(mesh), "after": _straight_vertices(out)}
    out.meta["perturbation"] = {"magnitude": str(magnitude), "seed": seed}
    return out


GENERATORS = {
    "halfcircle": gen_halfcircle,
    "fatring": gen_fat_ring,
    "towers": gen_carrot_towers,
    "grid": gen_grid_strip,
}
