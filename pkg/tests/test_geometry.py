import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from potatoes.geometry import (Angle, CirclePosition, Containment, DegenerateCircle,
                               DegenerateTriangle, Direction, EmptyInput, NotConvex, Orientation,
                               Point, angle_between, check_convex, compare_directions,
                               convex_hull, floor_ratio, ceil_ratio, in_circle,
                               largest_inscribed_circle, min_angle, orientation,
                               point_in_convex_polygon, smallest_enclosing_circle, triangle_angles)

coords = st.integers(-50, 50)
points = st.builds(Point, coords, coords)
small_vectors = st.tuples(st.integers(-20, 20), st.integers(-20, 20)).filter(lambda v: v != (0, 0))


def P(x, y):
    return Point(x, y)


# -- orientation -------------------------------------------------------------

def test_orientation_examples():
    assert orientation(P(0, 0), P(1, 0), P(0, 1)) == Orientation.LEFT
    assert orientation(P(0, 0), P(1, 0), P(2, 0)) == Orientation.STRAIGHT
    assert orientation(P(0, 0), P(0, 1), P(1, 0)) == Orientation.RIGHT


@given(points, points, points)
def test_orientation_flips_under_swaps(a, b, c):
    o = orientation(a, b, c)
    assert orientation(b, a, c) == -o
    assert orientation(a, c, b) == -o
    assert orientation(c, b, a) == -o
    assert orientation(b, c, a) == o


def test_rational_coordinates_are_exact():
    a, b = P(Fraction(1, 3), 0), P(Fraction(2, 3), Fraction(1, 7))
    c = Point(a.x + 2 * (b.x - a.x), a.y + 2 * (b.y - a.y))
    assert orientation(a, b, c) == Orientation.STRAIGHT


# -- angles ------------------------------------------------------------------

def test_min_angle_equilateral_like():
    # No rational equilateral triangle exists; a near-equilateral one brackets pi/3 closely.
    s = Fraction(1732050807568877, 10 ** 15)  # ~ sqrt(3)
    ang = min_angle(P(0, 0), P(2, 0), P(1, s))
    assert abs(ang.radians - math.pi / 3) < 1e-12


def test_min_angle_right_isosceles_is_exact_quarter():
    ang = min_angle(P(0, 0), P(1, 0), P(0, 1))
    assert ang == Angle.quarter_turn() * 1 - Angle(1, 1)  # pi/2 - pi/4
    assert ang == Angle(1, 1)
    assert ang.lo <= Fraction(math.pi / 4) <= ang.hi or abs(ang.radians - math.pi / 4) < 1e-15


def test_min_angle_against_mpmath_oracle():
    ang = min_angle(P(0, 0), P(4, 0), P(0, 1))
    with mpmath.workprec(200):
        truth = mpmath.atan(mpmath.mpf(1) / 4)
        lo, hi = ang.bounds(80).lo, ang.bounds(80).hi
        assert mpmath.mpf(lo.numerator) / lo.denominator <= truth <= mpmath.mpf(hi.numerator) / hi.denominator
    assert abs(ang.radians - 0.2449786631) < 1e-9


def test_min_angle_interval_shrinks_with_precision():
    ang = min_angle(P(0, 0), P(4, 0), P(0, 1))
    assert ang.bounds(128).width < ang.bounds(32).width
    assert ang.bounds(80).width < Fraction(1, 2 ** 70)


def test_degenerate_triangle_rejected():
    with pytest.raises(DegenerateTriangle):
        min_angle(P(0, 0), P(1, 1), P(2, 2))


@given(points, points, points)
def test_triangle_angles_sum_to_half_turn_exactly(a, b, c):
    assume(orientation(a, b, c) != Orientation.STRAIGHT)
    x, y, z = triangle_angles(a, b, c)
    assert x + y + z == Angle.half_turn()


@given(small_vectors, small_vectors)
def test_angle_addition_inverts(u, v):
    a, b = Angle(*u), Angle(*v)
    assert (a + b) - b == a
    assert a * 3 == a + a + a
    assert -(-a) == a


def test_compare_directions_examples():
    assert compare_directions(Direction(1, 0), Direction(0, 1)) == Angle.quarter_turn()
    assert compare_directions(Direction(1, 0), Direction(2, 0)) == Angle.zero()
    assert Direction(1, 0) == Direction(2, 0)
    assert compare_directions(Direction(1, 0), Direction(-1, 0)) == Angle.half_turn()


@given(small_vectors, small_vectors, small_vectors)
def test_cyclic_order_is_strict_and_total(a, b, c):
    da, db, dc = Direction(*a), Direction(*b), Direction(*c)
    assume(len({da, db, dc}) == 3)
    forward = compare_directions(da, db) + compare_directions(db, dc) + compare_directions(dc, da)
    backward = compare_directions(da, dc) + compare_directions(dc, db) + compare_directions(db, da)
    # Exactly one of the two cyclic arrangements winds once.
    assert {forward, backward} == {Angle.full_turn(), Angle.full_turn() * 2}


def test_floor_and_ceil_ratio():
    third = Angle(1, 1) + Angle(1, 1)  # pi/2
    assert floor_ratio(Angle.full_turn(), third) == 4
    assert ceil_ratio(Angle.full_turn(), third) == 4
    eighth = Angle(1, 1)
    assert floor_ratio(Angle.half_turn(), Angle(2, 1)) == 6  # atan(1/2) ~ 0.4636
    assert ceil_ratio(Angle.half_turn(), Angle(2, 1)) == 7
    assert ceil_ratio(Angle.half_turn(), eighth) == 4


def test_compare_real():
    a = Angle(1, 1)
    assert a.compare_real(math.pi / 4 + 1e-9) < 0
    assert a.compare_real(math.pi / 4 - 1e-9) > 0


# -- circles ----------------------------------------------------------------

def test_in_circle_examples():
    a, b, c = P(0, 0), P(1, 0), P(0, 1)
    assert in_circle(a, b, c, P(100, 100)) == CirclePosition.OUTSIDE
    assert in_circle(a, b, c, P(1, 1)) == CirclePosition.ON_CIRCLE
    assert in_circle(a, b, c, P(Fraction(1, 3), Fraction(1, 3))) == CirclePosition.INSIDE
    with pytest.raises(DegenerateCircle):
        in_circle(P(0, 0), P(1, 1), P(2, 2), P(5, 0))


def _brute_enclosing(pts):
    """Smallest circle over all 1-, 2- and 3-point support sets."""
    best = None
    cands = []
    for p in pts:
        cands.append((p.x, p.y, Fraction(0)))
    for p, q in itertools.combinations(pts, 2):
        cx, cy = (p.x + q.x) / 2, (p.y + q.y) / 2
        cands.append((cx, cy, (p.x - cx) ** 2 + (p.y - cy) ** 2))
    for p, q, r in itertools.combinations(pts, 3):
        d = 2 * (p.x * (q.y - r.y) + q.x * (r.y - p.y) + r.x * (p.y - q.y))
        if d == 0:
            continue
        ux = ((p.x ** 2 + p.y ** 2) * (q.y - r.y) + (q.x ** 2 + q.y ** 2) * (r.y - p.y)
              + (r.x ** 2 + r.y ** 2) * (p.y - q.y)) / d
        uy = ((p.x ** 2 + p.y ** 2) * (r.x - q.x) + (q.x ** 2 + q.y ** 2) * (p.x - r.x)
              + (r.x ** 2 + r.y ** 2) * (q.x - p.x)) / d
        cands.append((ux, uy, (p.x - ux) ** 2 + (p.y - uy) ** 2))
    for cx, cy, r2 in cands:
        if all((p.x - cx) ** 2 + (p.y - cy) ** 2 <= r2 for p in pts):
            if best is None or r2 < best:
                best = r2
    return best


def test_enclosing_circle_examples():
    sq = smallest_enclosing_circle([P(0, 0), P(1, 0), P(1, 1), P(0, 1)])
    assert (sq.cx, sq.cy, sq.radius_squared) == (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))
    assert smallest_enclosing_circle([P(3, 4)]).radius_squared == 0
    c = smallest_enclosing_circle([P(0, 0), P(2, 0), P(1, 10)])
    assert c.radius_squared == _brute_enclosing([P(0, 0), P(2, 0), P(1, 10)])
    with pytest.raises(EmptyInput):
        smallest_enclosing_circle([])


@settings(max_examples=60, deadline=None)
@given(st.lists(points, min_size=1, max_size=9))
def test_enclosing_circle_matches_brute_force(pts):
    c = smallest_enclosing_circle(pts)
    assert all(c.contains(p) for p in pts)
    assert c.radius_squared == _brute_enclosing(pts)
    on = [p for p in set(pts) if (p.x - c.cx) ** 2 + (p.y - c.cy) ** 2 == c.radius_squared]
    assert len(on) >= min(2, len(set(pts)))


def _lp_inscribed_radius(poly):
    """Chebyshev centre by linear programming (float oracle)."""
    A, b = [], []
    m = len(poly)
    for i in range(m):
        p, q = poly[i], poly[(i + 1) % m]
        nx, ny = float(q.y - p.y), -float(q.x - p.x)  # outward normal
        norm = math.hypot(nx, ny)
        A.append([nx, ny, norm])
        b.append(nx * float(p.x) + ny * float(p.y))
    res = linprog([0, 0, -1], A_ub=np.array(A), b_ub=np.array(b), bounds=[(None, None)] * 3)
    return res.x[2]


def test_inscribed_circle_examples():
    sq = largest_inscribed_circle([P(0, 0), P(1, 0), P(1, 1), P(0, 1)])
    assert sq.exact and sq.radius_squared == Fraction(1, 4)
    assert (sq.cx, sq.cy) == (Fraction(1, 2), Fraction(1, 2))
    rect = [P(0, 0), P(10, 0), P(10, 1), P(0, 1)]
    ins = largest_inscribed_circle(rect)
    assert ins.radius_squared == Fraction(1, 4)
    out = smallest_enclosing_circle(rect)
    assert out.radius_squared == Fraction(101, 4)
    assert out.radius_squared > 100 * ins.radius_squared  # ratio above 10


def test_inscribed_circle_near_equilateral_ratio_close_to_two():
    s = Fraction(1732050807568877, 10 ** 15)
    tri = [P(0, 0), P(2, 0), P(1, s)]
    r2 = largest_inscribed_circle(tri).radius_squared
    R2 = smallest_enclosing_circle(tri).radius_squared
    ratio = math.sqrt(float(R2) / float(r2))
    assert abs(ratio - 2) < 1e-9
    assert abs(math.sqrt(float(r2)) - 1 / math.sqrt(3)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.lists(points, min_size=3, max_size=10))
def test_inscribed_circle_matches_lp(pts):
    hull = convex_hull(pts)
    assume(len(hull) >= 3)
    c = largest_inscribed_circle(hull)
    r = math.sqrt(float(c.radius_squared))
    assert abs(r - _lp_inscribed_radius(hull)) < 1e-7 * max(1.0, r)


def test_inscribed_circle_rejects_nonconvex():
    with pytest.raises(NotConvex):
        largest_inscribed_circle([P(0, 0), P(4, 0), P(1, 1), P(0, 4)])


def test_check_convex_allows_straight_vertices():
    assert len(check_convex([P(0, 0), P(1, 0), P(2, 0), P(2, 2)])) == 3
    with pytest.raises(NotConvex):
        check_convex([P(0, 0), P(0, 2), P(2, 2), P(2, 0)])  # clockwise


def test_point_in_convex_polygon():
    tri = [P(0, 0), P(3, 0), P(0, 3)]
    assert point_in_convex_polygon(P(1, 1), tri) == Containment.STRICTLY_INSIDE
    assert point_in_convex_polygon(P(3, 0), tri) == Containment.ON_BOUNDARY
    assert point_in_convex_polygon(P(-1, 1), tri) == Containment.OUTSIDE


def test_angle_between_is_symmetric():
    assert angle_between((1, 0), (0, 5)) == Angle.quarter_turn()
    assert angle_between((0, 5), (1, 0)) == Angle.quarter_turn()
