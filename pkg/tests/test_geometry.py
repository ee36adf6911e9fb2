import math

import pytest
from hypothesis import given
from hypothesis import strategies as st
from oracles import exact_incircle, exact_orient

from tetherplan.geometry import (
    IntersectionKind,
    Location,
    Orientation,
    Point,
    Polygon,
    incircle_sign,
    orient,
    orient_sign,
    point_in_polygon,
    polyline_length,
    segment_intersection,
    simplify_polyline,
)

UNIT = Polygon.ccw([(0, 0), (1, 0), (1, 1), (0, 1)])

# small integers and dyadic fractions are exact in binary floating point
coord = st.one_of(st.integers(-8, 8), st.integers(-64, 64).map(lambda v: v / 8))
point = st.tuples(coord, coord)


@pytest.mark.parametrize(
    "p,q,r,want",
    [
        ((0, 0), (1, 0), (0, 1), Orientation.CCW),
        ((0, 0), (1, 0), (2, 0), Orientation.COLLINEAR),
        ((0, 0), (0, 1), (1, 0), Orientation.CW),
    ],
)
def test_orient_examples(p, q, r, want):
    assert orient(p, q, r) is want


def test_orient_near_degenerate():
    # float evaluation of this determinant loses the sign; the exact fallback does not
    p, q = (0.5, 0.5), (12.0, 12.0)
    r = (24.0, 24.000000000000004)
    assert orient_sign(p, q, r) == exact_orient(p, q, r) == 1
    assert orient_sign(p, q, (24.0, 24.0)) == 0


def test_orient_tiny_coordinates():
    # both products underflow to zero in floating point
    r = (9.055574510973576e-289, 9.055574510973576e-289 * 9.055574510973576e-289)
    assert orient_sign((0.0, 0.0), (1.0, 9.055574510973576e-289), r) == -1


def test_segment_intersection_examples():
    hit = segment_intersection(((0, 0), (2, 2)), ((0, 2), (2, 0)))
    assert hit.kind is IntersectionKind.PROPER and hit.point == (1, 1)
    assert segment_intersection(((0, 0), (1, 0)), ((2, 0), (3, 0))).kind is IntersectionKind.NONE
    hit = segment_intersection(((0, 0), (1, 1)), ((1, 1), (2, 0)))
    assert hit.kind is IntersectionKind.TOUCHING and hit.point == (1, 1)
    assert segment_intersection(((0, 0), (2, 0)), ((1, 0), (3, 0))).kind is IntersectionKind.OVERLAP


def test_polyline_length_examples():
    assert polyline_length([(0, 0), (3, 4)]) == 5
    assert polyline_length([(0, 0), (1, 0), (1, 1)]) == 2
    got = polyline_length([(2, 5), (4, 4), (6, 4), (8, 5)])
    brute = sum(math.sqrt((b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2) for a, b in [((2, 5), (4, 4)), ((4, 4), (6, 4)), ((6, 4), (8, 5))])
    assert got == pytest.approx(2 * math.sqrt(5) + 2, abs=1e-12)
    assert got == pytest.approx(brute, abs=1e-12)


def test_point_in_polygon_examples():
    assert point_in_polygon((0.5, 0.5), UNIT) is Location.INSIDE
    assert point_in_polygon((2, 2), UNIT) is Location.OUTSIDE
    assert point_in_polygon((1, 0.5), UNIT) is Location.BOUNDARY
    assert point_in_polygon((0, 0), UNIT) is Location.BOUNDARY


def test_polygon_ccw_and_simplicity():
    cw = Polygon.ccw([(0, 0), (0, 1), (1, 1), (1, 0)])
    assert cw.area == 1.0
    assert Polygon.ccw([(0, 0), (2, 2), (2, 0), (0, 2)]).simplicity_problem()
    assert Polygon.ccw([(0, 0), (1, 0), (2, 0)]).simplicity_problem() == "zero area"
    assert UNIT.simplicity_problem() is None


def test_simplify_polyline_drops_straight_and_repeated():
    assert simplify_polyline([(0, 0), (0, 0), (1, 0), (2, 0), (2, 1)]) == ((0, 0), (2, 0), (2, 1))
    assert simplify_polyline([(0, 0), (0, 0)]) == (Point(0, 0),)


@given(point, point, point)
def test_orient_matches_rational_oracle(p, q, r):
    assert orient_sign(p, q, r) == exact_orient(p, q, r)


@given(point, point, point)
def test_orient_antisymmetric(p, q, r):
    s = orient_sign(p, q, r)
    assert orient_sign(q, p, r) == -s
    assert orient_sign(p, r, q) == -s
    assert orient_sign(r, q, p) == -s


@given(point, point, point, point)
def test_segment_intersection_symmetric(a, b, c, d):
    if a == b or c == d:
        return
    one = segment_intersection((a, b), (c, d))
    two = segment_intersection((c, d), (a, b))
    assert one.kind is two.kind
    if one.kind in (IntersectionKind.PROPER, IntersectionKind.TOUCHING):
        assert one.point == pytest.approx(two.point, abs=1e-12)


@given(point, point, point, point)
def test_proper_intersection_agrees_with_exact_orientation(a, b, c, d):
    if a == b or c == d:
        return
    proper = (
        exact_orient(a, b, c) * exact_orient(a, b, d) < 0 and exact_orient(c, d, a) * exact_orient(c, d, b) < 0
    )
    assert (segment_intersection((a, b), (c, d)).kind is IntersectionKind.PROPER) == proper


@given(st.lists(point, min_size=2, max_size=8), st.floats(0, 2 * math.pi), point)
def test_polyline_length_rigid_invariant(pts, angle, shift):
    c, s = math.cos(angle), math.sin(angle)
    moved = [(c * x - s * y + shift[0], s * x + c * y + shift[1]) for x, y in pts]
    assert polyline_length(moved) == pytest.approx(polyline_length(pts), rel=1e-9, abs=1e-9)


@given(st.lists(point, min_size=2, max_size=6), st.lists(point, min_size=1, max_size=6))
def test_polyline_length_additive(first, rest):
    whole = first + rest
    joined = polyline_length(first) + polyline_length([first[-1]] + rest)
    assert polyline_length(whole) == pytest.approx(joined, rel=1e-12, abs=1e-12)


@given(point, point, point, point)
def test_incircle_matches_rational_oracle(a, b, c, d):
    if exact_orient(a, b, c) <= 0:
        return
    assert incircle_sign(a, b, c, d) == exact_incircle(a, b, c, d)


def test_incircle_cocircular():
    assert incircle_sign((0, 0), (1, 0), (1, 1), (0, 1)) == 0
    assert incircle_sign((0, 0), (1, 0), (1, 1), (0.5, 0.5)) == 1


real = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


@given(real, real, real, real, st.floats(-3, 3))
def test_orient_nearly_collinear_matches_oracle(px, py, qx, qy, t):
    # r is p + t (q - p) rounded to floats: collinear up to a few ulps
    p, q = (px, py), (qx, qy)
    r = (px + t * (qx - px), py + t * (qy - py))
    assert orient_sign(p, q, r) == exact_orient(p, q, r)
