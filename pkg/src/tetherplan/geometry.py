"""Planar primitives and exact predicates.

Predicates use a floating-point filter (Shewchuk's stage-A error bounds) and fall
back to exact rational arithmetic when the filter cannot certify the sign, so the
combinatorial decisions made by the triangulation and the signature code never
depend on rounding.  Points are plain ``(x, y)`` tuples; :class:`Point` is a
NamedTuple so both spellings interoperate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

# Tolerance for snapping / point equality in I/O only. Never used inside predicates.
EPS = 1e-9

_MACHINE_EPS = 2.0 ** -53
_CCW_ERRBOUND = (3.0 + 16.0 * _MACHINE_EPS) * _MACHINE_EPS
_ICC_ERRBOUND = (10.0 + 96.0 * _MACHINE_EPS) * _MACHINE_EPS
# products below this may have underflowed; such inputs go straight to exact arithmetic
_TINY = 1e-280


class Point(NamedTuple):
    x: float
    y: float


Polyline = tuple  # tuple of points; a single point denotes a zero-length path


class Orientation(enum.IntEnum):
    CW = -1
    COLLINEAR = 0
    CCW = 1


class Location(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    BOUNDARY = "boundary"


class IntersectionKind(enum.Enum):
    NONE = "none"
    PROPER = "proper"
    TOUCHING = "touching"
    OVERLAP = "overlap"


class Intersection(NamedTuple):
    kind: IntersectionKind
    point: Point | None = None


def _as_ints(*vals) -> list:
    """Scale values to integers over a common denominator (exact for floats,
    whose denominators are powers of two); signs of homogeneous polynomials
    in the values are unchanged."""
    ratios = [v.as_integer_ratio() if hasattr(v, "as_integer_ratio") else Fraction(v).as_integer_ratio() for v in vals]
    den = math.lcm(*(d for _, d in ratios))
    return [n * (den // d) for n, d in ratios]


def _orient_exact(p, q, r) -> int:
    px, py, qx, qy, rx, ry = _as_ints(p[0], p[1], q[0], q[1], r[0], r[1])
    det = (px - rx) * (qy - ry) - (py - ry) * (qx - rx)
    return (det > 0) - (det < 0)


def orient_sign(p, q, r) -> int:
    """Sign of twice the signed area of ``pqr``: 1 CCW, -1 CW, 0 collinear."""
    ax, by = p[0] - r[0], q[1] - r[1]
    ay, bx = p[1] - r[1], q[0] - r[0]
    detleft = ax * by
    detright = ay * bx
    # the error bound below assumes no underflow
    if (abs(detleft) < _TINY and ax and by) or (abs(detright) < _TINY and ay and bx):
        return _orient_exact(p, q, r)
    det = detleft - detright
    if detleft > 0.0:
        if detright <= 0.0:
            return 1 if det > 0.0 else (-1 if det < 0.0 else 0)
        detsum = detleft + detright
    elif detleft < 0.0:
        if detright >= 0.0:
            return 1 if det > 0.0 else (-1 if det < 0.0 else 0)
        detsum = -detleft - detright
    else:
        return 1 if det > 0.0 else (-1 if det < 0.0 else 0)
    errbound = _CCW_ERRBOUND * detsum
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    return _orient_exact(p, q, r)


def orient(p, q, r) -> Orientation:
    return Orientation(orient_sign(p, q, r))


def _incircle_exact(a, b, c, d) -> int:
    ax, ay, bx, by, cx, cy, dx, dy = _as_ints(a[0], a[1], b[0], b[1], c[0], c[1], d[0], d[1])
    adx, ady = ax - dx, ay - dy
    bdx, bdy = bx - dx, by - dy
    cdx, cdy = cx - dx, cy - dy
    det = (
        (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy)
        + (bdx * bdx + bdy * bdy) * (cdx * ady - adx * cdy)
        + (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady)
    )
    return (det > 0) - (det < 0)


def incircle_sign(a, b, c, d) -> int:
    """Positive if ``d`` lies strictly inside the circle through CCW ``a, b, c``."""
    adx = a[0] - d[0]
    bdx = b[0] - d[0]
    cdx = c[0] - d[0]
    ady = a[1] - d[1]
    bdy = b[1] - d[1]
    cdy = c[1] - d[1]
    bdxcdy = bdx * cdy
    cdxbdy = cdx * bdy
    alift = adx * adx + ady * ady
    cdxady = cdx * ady
    adxcdy = adx * cdy
    blift = bdx * bdx + bdy * bdy
    adxbdy = adx * bdy
    bdxady = bdx * ady
    clift = cdx * cdx + cdy * cdy
    det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady)
    permanent = (
        (abs(bdxcdy) + abs(cdxbdy)) * alift
        + (abs(cdxady) + abs(adxcdy)) * blift
        + (abs(adxbdy) + abs(bdxady)) * clift
    )
    if permanent < _TINY:
        return _incircle_exact(a, b, c, d)
    errbound = _ICC_ERRBOUND * permanent
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    return _incircle_exact(a, b, c, d)


def dist(p, q) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


def on_segment(p, a, b) -> bool:
    """True if ``p`` lies on the closed segment ``ab`` (exact)."""
    if orient_sign(a, b, p) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def strictly_between(p, a, b) -> bool:
    """True if ``p`` lies on the open segment ``ab``."""
    return p != a and p != b and on_segment(p, a, b)


def segment_intersection(s1, s2) -> Intersection:
    """Classify the intersection of two closed segments ``((p, q), (r, s))``."""
    p, q = s1
    r, s = s2
    o1 = orient_sign(p, q, r)
    o2 = orient_sign(p, q, s)
    o3 = orient_sign(r, s, p)
    o4 = orient_sign(r, s, q)
    if o1 == 0 and o2 == 0:
        # collinear: project on the dominant axis
        axis = 0 if abs(q[0] - p[0]) >= abs(q[1] - p[1]) else 1
        a0, a1 = sorted((p, q), key=lambda t: t[axis])
        b0, b1 = sorted((r, s), key=lambda t: t[axis])
        lo = a0 if a0[axis] >= b0[axis] else b0
        hi = a1 if a1[axis] <= b1[axis] else b1
        if lo[axis] > hi[axis]:
            return Intersection(IntersectionKind.NONE)
        if lo[axis] == hi[axis]:
            return Intersection(IntersectionKind.TOUCHING, Point(*lo))
        return Intersection(IntersectionKind.OVERLAP)
    if o1 * o2 < 0 and o3 * o4 < 0:
        d1x, d1y = q[0] - p[0], q[1] - p[1]
        d2x, d2y = s[0] - r[0], s[1] - r[1]
        denom = d1x * d2y - d1y * d2x
        t = ((r[0] - p[0]) * d2y - (r[1] - p[1]) * d2x) / denom
        return Intersection(IntersectionKind.PROPER, Point(p[0] + t * d1x, p[1] + t * d1y))
    for cand, a, b in ((r, p, q), (s, p, q), (p, r, s), (q, r, s)):
        if on_segment(cand, a, b):
            return Intersection(IntersectionKind.TOUCHING, Point(*cand))
    return Intersection(IntersectionKind.NONE)


def segments_cross(p, q, r, s) -> bool:
    """Fast exact test for a proper crossing of open segments ``pq`` and ``rs``."""
    return (
        orient_sign(p, q, r) * orient_sign(p, q, s) < 0
        and orient_sign(r, s, p) * orient_sign(r, s, q) < 0
    )


def polyline_length(points: Sequence) -> float:
    return math.fsum(dist(points[i], points[i + 1]) for i in range(len(points) - 1))


def signed_area(points: Sequence) -> float:
    n = len(points)
    return 0.5 * math.fsum(
        points[i][0] * points[(i + 1) % n][1] - points[(i + 1) % n][0] * points[i][1] for i in range(n)
    )


@dataclass(frozen=True)
class Polygon:
    """Simple polygon with counterclockwise vertices (closed implicitly)."""

    vertices: tuple

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(Point(float(x), float(y)) for x, y in self.vertices))

    @classmethod
    def ccw(cls, points: Iterable) -> "Polygon":
        pts = [Point(float(x), float(y)) for x, y in points]
        if signed_area(pts) < 0:
            pts.reverse()
        return cls(tuple(pts))

    @property
    def area(self) -> float:
        return signed_area(self.vertices)

    def edges(self):
        vs = self.vertices
        return [(vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs))]

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def centroid(self) -> Point:
        vs = self.vertices
        n = len(vs)
        a = 0.0
        cx = cy = 0.0
        for i in range(n):
            x0, y0 = vs[i]
            x1, y1 = vs[(i + 1) % n]
            cr = x0 * y1 - x1 * y0
            a += cr
            cx += (x0 + x1) * cr
            cy += (y0 + y1) * cr
        return Point(cx / (3.0 * a), cy / (3.0 * a))

    def simplicity_problem(self) -> str | None:
        """Return a description of why the polygon is invalid, or None."""
        vs = self.vertices
        n = len(vs)
        if n < 3:
            return "fewer than 3 vertices"
        if any(vs[i] == vs[(i + 1) % n] for i in range(n)):
            return "repeated consecutive vertex"
        if len(set(vs)) != n:
            return "repeated vertex"
        if self.area == 0.0:
            return "zero area"
        edges = self.edges()
        for i in range(n):
            for j in range(i + 1, n):
                hit = segment_intersection(edges[i], edges[j])
                if hit.kind is IntersectionKind.NONE:
                    continue
                adjacent = j == i + 1 or (i == 0 and j == n - 1)
                if adjacent and hit.kind is IntersectionKind.TOUCHING:
                    continue
                return f"edges {i} and {j} intersect"
        return None


def point_in_polygon(p, poly: Polygon | Sequence) -> Location:
    vs = poly.vertices if isinstance(poly, Polygon) else poly
    n = len(vs)
    winding = 0
    for i in range(n):
        a = vs[i]
        b = vs[(i + 1) % n]
        if on_segment(p, a, b):
            return Location.BOUNDARY
        if a[1] <= p[1]:
            if b[1] > p[1] and orient_sign(a, b, p) > 0:
                winding += 1
        elif b[1] <= p[1] and orient_sign(a, b, p) < 0:
            winding -= 1
    return Location.INSIDE if winding else Location.OUTSIDE


def point_in_triangle(p, a, b, c) -> bool:
    """Closed containment test for a CCW triangle."""
    return orient_sign(a, b, p) >= 0 and orient_sign(b, c, p) >= 0 and orient_sign(c, a, p) >= 0


def simplify_polyline(points: Sequence) -> tuple:
    """Drop repeated points and interior vertices where the path goes straight on."""
    out: list = []
    for p in points:
        p = Point(*p)
        if out and out[-1] == p:
            continue
        while len(out) >= 2 and orient_sign(out[-2], out[-1], p) == 0 and _straight_on(out[-2], out[-1], p):
            out.pop()
        out.append(p)
    return tuple(out)


def _straight_on(a, b, c) -> bool:
    # collinear a, b, c with b between a and c (no reversal)
    return (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]) >= 0
