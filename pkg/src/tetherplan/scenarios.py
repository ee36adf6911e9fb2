"""Hand-built and randomly generated 10x10 environments."""

from __future__ import annotations

import functools
import math
import random

import shapely

from .environment import Environment, ValidatedEnvironment, validate
from .geometry import Point, Polygon

# obstacles are kept this far apart (and from the walls) so every passage is at
# least two cells wide on the coarsest comparison grid
MIN_GAP = 1.0
# obstacles together cover roughly this share of the room
OBSTACLE_FILL = 0.2

SQUARE = ((0.0, 0.0), (10.0, 0.0), (10.0, 10.0), (0.0, 10.0))


def _env(obstacles, anchor, length, workspace=SQUARE) -> ValidatedEnvironment:
    return validate(
        Environment(
            workspace=Polygon.ccw(workspace),
            obstacles=tuple(Polygon.ccw(o) for o in obstacles),
            anchor=Point(*anchor),
            tether_length=float(length),
        )
    )


def single_square(length: float = 7.0) -> ValidatedEnvironment:
    """10x10 room, one 2x2 block in the middle, anchor left of it."""
    return _env([((4, 4), (6, 4), (6, 6), (4, 6))], (2, 5), length)


def hand_built() -> dict:
    """Small fixed environments with one or two obstacles."""
    return {
        "square": single_square(12.0),
        "triangle": _env([((3, 3), (7, 4), (4, 7))], (1.5, 1.5), 14.0),
        "two_blocks": _env([((2, 4), (4, 4), (4, 6), (2, 6)), ((6, 3), (8, 3), (8, 7), (6, 7))], (5, 1), 14.0),
        "ell_and_block": _env(
            [((2, 2), (5, 2), (5, 3), (3, 3), (3, 5), (2, 5)), ((6.5, 6), (8, 6), (8, 8.5), (6.5, 8.5))],
            (1, 8),
            15.0,
        ),
        "ell_room": _env(
            [((4, 2.5), (5.5, 2.5), (5.5, 4), (4, 4))],
            (1, 1),
            16.0,
            workspace=((0, 0), (10, 0), (10, 6), (6, 6), (6, 10), (0, 10)),
        ),
    }


def _random_convex(rng: random.Random, center, radius: float) -> list:
    k = rng.randint(3, 6)
    angles = sorted(rng.uniform(0, 2 * math.pi) for _ in range(k))
    pts = []
    for a in angles:
        r = radius * rng.uniform(0.6, 1.0)
        pts.append((round(center[0] + r * math.cos(a), 3), round(center[1] + r * math.sin(a), 3)))
    hull = shapely.convex_hull(shapely.multipoints(pts))
    return list(hull.exterior.coords)[:-1] if hull.geom_type == "Polygon" else []


@functools.lru_cache(maxsize=64)
def generate_environment(m: int, seed: int, length: float = 10.0) -> ValidatedEnvironment:
    """Random 10x10 environment with ``m`` disjoint convex obstacles."""
    rng = random.Random(seed)
    # a random convex polygon with k in 3..6 corners at 0.6..1.0 r covers about 1.3 r^2
    radius = min(2.5, math.sqrt(OBSTACLE_FILL * 100.0 / (1.3 * max(m, 1))))
    for _ in range(200):
        placed: list = []
        shapes: list = []
        tries = 0
        while len(placed) < m and tries < 2000:
            tries += 1
            lo, hi = MIN_GAP + 0.6 * radius, 10 - MIN_GAP - 0.6 * radius
            c = (rng.uniform(lo, hi), rng.uniform(lo, hi))
            pts = _random_convex(rng, c, radius)
            if len(pts) < 3:
                continue
            poly = shapely.Polygon(pts)
            x0, y0, x1, y1 = poly.bounds
            if min(x0, y0) < MIN_GAP or max(x1, y1) > 10 - MIN_GAP:
                continue
            if poly.area < 0.4 * radius * radius or any(poly.distance(o) < MIN_GAP for o in shapes):
                continue
            placed.append(pts)
            shapes.append(poly)
        if len(placed) < m:
            continue
        blocked = shapely.unary_union(shapes) if shapes else None
        for _ in range(500):
            a = (round(rng.uniform(0.5, 9.5), 3), round(rng.uniform(0.5, 9.5), 3))
            if blocked is None or blocked.distance(shapely.Point(a)) > 0.5:
                try:
                    return _env(placed, a, length)
                except Exception:
                    break
    raise RuntimeError(f"could not generate an environment with {m} obstacles")
