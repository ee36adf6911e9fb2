from __future__ import annotations

import math
import random

import pytest
from hypothesis import settings

from tetherplan.cover import build_complex
from tetherplan.environment import Environment, validate
from tetherplan.geometry import Point, Polygon
from tetherplan.scenarios import single_square
from tetherplan.triangulation import dual_graph, triangulate

# environment generation and cover builds vary a lot in cost between examples
settings.register_profile("tetherplan", deadline=None)
settings.load_profile("tetherplan")

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


def make_env(workspace, obstacles=(), anchor=(0, 0), length=10.0):
    return validate(
        Environment(
            workspace=Polygon.ccw(workspace),
            obstacles=tuple(Polygon.ccw(o) for o in obstacles),
            anchor=Point(*anchor),
            tether_length=float(length),
        )
    )


def cover_of(venv, length=None):
    """(complex, triangulation) for an environment, optionally at another length."""
    l = venv.tether_length if length is None else length
    T = triangulate(venv)
    G = dual_graph(T, venv.anchor, venv.generators)
    return build_complex(T, G, venv.anchor, l, venv.generators), T


def random_star(rng: random.Random, k: int | None = None, r=(2.0, 6.0)):
    """Polygon star-shaped about the origin: jittered angles, random radii."""
    k = k or rng.randint(5, 12)
    # one angle per sector keeps every gap below pi, so the origin is in the kernel
    angles = [2 * math.pi * (i + rng.uniform(0.15, 0.85)) / k for i in range(k)]
    pts = []
    for a in angles:
        rad = rng.uniform(*r)
        pts.append((round(rad * math.cos(a), 4), round(rad * math.sin(a), 4)))
    return pts


def diameter(points) -> float:
    return max(math.dist(p, q) for p in points for q in points)


@pytest.fixture(scope="session")
def square7():
    return cover_of(single_square(7.0))


@pytest.fixture(scope="session")
def square12():
    return cover_of(single_square(12.0))


@pytest.fixture(scope="session")
def square20():
    return cover_of(single_square(20.0))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
