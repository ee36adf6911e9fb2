import json
import math
import random

import pytest
import shapely
from conftest import make_env, random_star
from hypothesis import given
from hypothesis import strategies as st
from oracles import free_space, triangles_polygon, visibility_shortest

from tetherplan.errors import TriangulationError
from tetherplan.funnel import Funnel
from tetherplan.geometry import Point, on_segment, orient_sign, point_in_triangle, polyline_length
from tetherplan.scenarios import generate_environment, hand_built, single_square
from tetherplan.triangulation import (
    Sleeve,
    collapse_backtracks,
    dual_graph,
    dump_triangulation,
    funnel_shortest,
    homotopic_shortest,
    sleeve_between,
    triangulate,
    walk_polyline,
)

SQUARE = [(0, 0), (10, 0), (10, 10), (0, 10)]
BLOCK = [(4, 4), (6, 4), (6, 6), (4, 6)]


def all_envs():
    envs = list(hand_built().values()) + [single_square()]
    envs += [generate_environment(m, s) for m in (1, 3, 6, 8) for s in (0, 1)]
    return envs


def test_unit_square():
    T = triangulate(make_env([(0, 0), (1, 0), (1, 1), (0, 1)], anchor=(0.5, 0.5)))
    assert (len(T.vertices), len(T.edges), len(T.triangles)) == (4, 5, 2)
    assert T.euler_characteristic() == 1


def test_square_with_hole():
    T = triangulate(single_square())
    assert len(T.triangles) == 8
    assert T.euler_characteristic() == 0
    idx = {v: i for i, v in enumerate(T.vertices)}
    for a, b in zip(BLOCK, BLOCK[1:] + BLOCK[:1]):
        key = tuple(sorted((idx[a], idx[b])))
        assert key in T.constrained


def test_disconnected_free_space():
    wall = [(4, 0), (6, 0), (6, 10), (4, 10)]
    with pytest.raises(TriangulationError) as info:
        triangulate(make_env(SQUARE, [wall], (2, 5)))
    assert info.value.code == "CONNECTIVITY_ERROR"


@pytest.mark.parametrize("venv", all_envs(), ids=lambda v: f"n{len(v.obstacles)}")
def test_triangulation_invariants(venv):
    T = triangulate(venv)
    # counterclockwise, nondegenerate
    for t in range(len(T.triangles)):
        a, b, c = T.corners(t)
        assert orient_sign(a, b, c) > 0
    # triangles tile the free space exactly
    tiles = [shapely.Polygon(T.corners(t)) for t in range(len(T.triangles))]
    free = free_space(venv)
    assert sum(p.area for p in tiles) == pytest.approx(free.area, rel=1e-12)
    assert shapely.union_all(tiles).symmetric_difference(free).area < 1e-9
    # Euler characteristic of a disk with holes
    assert T.euler_characteristic() == 1 - len(venv.relevant)
    # every environment edge bordering free space is a union of constrained edges
    for poly in (venv.workspace, *venv.obstacles):
        for a, b in poly.edges():
            pieces = [
                (T.vertices[i], T.vertices[j])
                for i, j in T.constrained
                if on_segment(T.vertices[i], a, b) and on_segment(T.vertices[j], a, b)
            ]
            covered = sum(math.dist(*p) for p in pieces)
            assert covered == pytest.approx(math.dist(a, b), abs=1e-9) or covered == 0.0
    # each edge used by at most two triangles and neighbors symmetric
    for t, row in enumerate(T.neighbors):
        for u in row:
            if u >= 0:
                assert t in T.neighbors[u]
                assert T.shared_edge(t, u) not in T.constrained


def test_triangulation_deterministic():
    for venv in all_envs()[:5]:
        assert dump_triangulation(triangulate(venv)) == dump_triangulation(triangulate(venv))


def test_dual_graph_examples():
    venv = make_env([(0, 0), (1, 0), (1, 1), (0, 1)], anchor=(0.25, 0.5))
    T = triangulate(venv)
    G = dual_graph(T, venv.anchor, venv.generators)
    assert len(G.reps) == 2 and G.edges == ((0, 1),)
    assert G.reps[G.anchor_triangle] == venv.anchor
    other = 1 - G.anchor_triangle
    assert G.reps[other] == T.centroid(other)


def test_representative_moved_off_ray():
    # triangle (3,9),(6,4),(6,10) has its centroid on the ray x = 5
    venv = make_env([(0, 0), (10, 0), (10, 10), (6, 10), (3, 9), (0, 10)], [[(4, 2), (6, 2), (6, 4), (4, 4)]], (1, 1))
    T = triangulate(venv)
    G = dual_graph(T, venv.anchor, venv.generators)
    g = venv.generators[0]
    hits = [t for t in range(len(T.triangles)) if on_segment(T.centroid(t), g.origin, g.far)]
    assert hits
    for t in hits:
        r = G.reps[t]
        assert r != T.centroid(t)
        assert math.dist(r, T.centroid(t)) == pytest.approx(1e-8, rel=1e-6)
        assert not on_segment(r, g.origin, g.far)
        a, b, c = T.corners(t)
        assert orient_sign(a, b, r) > 0 and orient_sign(b, c, r) > 0 and orient_sign(c, a, r) > 0


@pytest.mark.parametrize("venv", all_envs()[:6], ids=lambda v: f"n{len(v.obstacles)}")
def test_representatives_inside_and_off_rays(venv):
    T = triangulate(venv)
    G = dual_graph(T, venv.anchor, venv.generators)
    for t, r in enumerate(G.reps):
        if t == G.anchor_triangle:
            assert r == venv.anchor
            continue
        a, b, c = T.corners(t)
        assert orient_sign(a, b, r) > 0 and orient_sign(b, c, r) > 0 and orient_sign(c, a, r) > 0
        assert not any(on_segment(r, g.origin, g.far) for g in venv.generators)


def test_locate():
    T = triangulate(single_square())
    for t in range(len(T.triangles)):
        assert T.locate(T.centroid(t)) == t
    # a point on an interior edge belongs to both triangles; the lower id wins
    for t, row in enumerate(T.neighbors):
        for u in row:
            if u > t:
                i, j = T.shared_edge(t, u)
                mid = Point((T.vertices[i][0] + T.vertices[j][0]) / 2, (T.vertices[i][1] + T.vertices[j][1]) / 2)
                assert T.locate(mid) == min(t, u)
                assert sorted(T.locate_all(mid)) == sorted((t, u))
    with pytest.raises(TriangulationError) as info:
        T.locate((5, 5))
    assert info.value.code == "POINT_NOT_IN_FREE_SPACE"


def test_sleeve_between():
    T = triangulate(single_square())
    t0 = 0
    t1, t2 = [u for u in T.neighbors[t0] if u >= 0][:2]
    assert sleeve_between(T, [t0]).triangles == (t0,)
    assert sleeve_between(T, [t0, t1, t0, t2]).triangles == (t0, t2)
    far = next(t for t in range(len(T.triangles)) if t != t0 and not T.adjacent(t0, t))
    with pytest.raises(TriangulationError) as info:
        sleeve_between(T, [t0, far])
    assert info.value.code == "NOT_A_SLEEVE"


def test_collapse_backtracks():
    assert collapse_backtracks([1, 2, 1, 3]) == [1, 3]
    assert collapse_backtracks([1, 2, 3, 2, 1]) == [1]
    assert collapse_backtracks([1, 1, 2]) == [1, 2]


def _below_sleeve(T):
    """Triangles crossed by the polyline under the block from (2,5) to (8,5)."""
    return sleeve_between(T, collapse_backtracks(walk_polyline(T, [(2, 5), (3, 3.5), (7, 3.5), (8, 5)])))


def test_funnel_single_obstacle_below():
    T = triangulate(single_square())
    s = _below_sleeve(T)
    path = funnel_shortest(s, (2, 5), (8, 5))
    assert path == ((2, 5), (4, 4), (6, 4), (8, 5))
    region = triangles_polygon(T, s.triangles)
    want, _ = visibility_shortest(region, (2, 5), (8, 5))
    assert polyline_length(path) == pytest.approx(2 * math.sqrt(5) + 2, abs=1e-12)
    assert polyline_length(path) == pytest.approx(want, abs=1e-9)


def test_funnel_straight_and_corner():
    venv = make_env([(0, 0), (4, 0), (4, 2), (2, 2), (2, 4), (0, 4)], anchor=(0.5, 0.5))
    T = triangulate(venv)
    a, b = (0.5, 3.5), (3.5, 1.5)
    s = sleeve_between(T, collapse_backtracks(walk_polyline(T, [a, (1, 1), b])))
    assert funnel_shortest(s, a, b) == (a, (2, 2), b)
    # grazing the reflex corner exactly still counts as straight
    s = sleeve_between(T, collapse_backtracks(walk_polyline(T, [a, (1, 1), (3.5, 0.5)])))
    assert funnel_shortest(s, a, (3.5, 0.5)) == (a, (3.5, 0.5))
    c = (0.5, 0.5)
    s = sleeve_between(T, collapse_backtracks(walk_polyline(T, [c, b])))
    assert funnel_shortest(s, c, b) == (c, b)


def test_funnel_invalid_endpoint():
    T = triangulate(single_square())
    s = _below_sleeve(T)
    with pytest.raises(TriangulationError) as info:
        funnel_shortest(s, (8, 5), (2, 5))
    assert info.value.code == "SLEEVE_INVALID"


def _random_sleeve(rng, T):
    tris = [rng.randrange(len(T.triangles))]
    for _ in range(rng.randint(0, 12)):
        nbrs = [u for u in T.neighbors[tris[-1]] if u >= 0 and u not in tris]
        if not nbrs:
            break
        tris.append(rng.choice(nbrs))
    return Sleeve(T, tuple(tris))


def _in_triangle(rng, pts):
    u, v = rng.random(), rng.random()
    if u + v > 1:
        u, v = 1 - u, 1 - v
    a, b, c = pts
    return Point(a[0] + u * (b[0] - a[0]) + v * (c[0] - a[0]), a[1] + u * (b[1] - a[1]) + v * (c[1] - a[1]))


@given(st.integers(0, 10**6))
def test_funnel_reverse_symmetry(seed):
    rng = random.Random(seed)
    T = triangulate(generate_environment(rng.choice((2, 6)), rng.randint(0, 3)))
    s = _random_sleeve(rng, T)
    a = _in_triangle(rng, T.corners(s.triangles[0]))
    b = _in_triangle(rng, T.corners(s.triangles[-1]))
    fwd = funnel_shortest(s, a, b)
    back = funnel_shortest(s.reversed(), b, a)
    assert len(fwd) == len(back)
    for p, q in zip(fwd, reversed(back)):
        assert p == pytest.approx(q, abs=1e-12)


@given(st.integers(0, 10**6))
def test_funnel_not_longer_than_sampled_polylines(seed):
    rng = random.Random(seed)
    T = triangulate(generate_environment(rng.choice((2, 6)), rng.randint(0, 3)))
    s = _random_sleeve(rng, T)
    a = _in_triangle(rng, T.corners(s.triangles[0]))
    b = _in_triangle(rng, T.corners(s.triangles[-1]))
    best = polyline_length(funnel_shortest(s, a, b))
    portals = [T.portal(t, u) for t, u in zip(s.triangles, s.triangles[1:])]
    for _ in range(100):
        pts = [a]
        for left, right in portals:
            w = rng.random()
            pts.append((left[0] + w * (right[0] - left[0]), left[1] + w * (right[1] - left[1])))
        pts.append(b)
        assert best <= polyline_length(pts) + 1e-9


@given(st.integers(0, 10**6))
def test_funnel_matches_visibility_oracle(seed):
    rng = random.Random(seed)
    ws = random_star(rng)
    T = triangulate(make_env(ws, length=1.0))
    s = _random_sleeve(rng, T)
    a = _in_triangle(rng, T.corners(s.triangles[0]))
    b = _in_triangle(rng, T.corners(s.triangles[-1]))
    got = polyline_length(funnel_shortest(s, a, b))
    want, _ = visibility_shortest(triangles_polygon(T, s.triangles), a, b)
    assert got == pytest.approx(want, rel=1e-9)


def test_funnel_path_bends_at_sleeve_vertices():
    rng = random.Random(11)
    T = triangulate(generate_environment(6, 6))
    verts = set(T.vertices)
    for _ in range(100):
        s = _random_sleeve(rng, T)
        a = _in_triangle(rng, T.corners(s.triangles[0]))
        b = _in_triangle(rng, T.corners(s.triangles[-1]))
        path = funnel_shortest(s, a, b)
        assert path[0] == a and path[-1] == b
        assert all(p in verts for p in path[1:-1])


def test_funnel_incremental_matches_batch():
    T = triangulate(single_square())
    s = _below_sleeve(T)
    f = Funnel.start((2, 5))
    for t, u in zip(s.triangles, s.triangles[1:]):
        g = f.extend(*T.portal(t, u))
        # extending never mutates the earlier funnel
        assert f.distance_to(T.centroid(t)) == Funnel.start((2, 5)).distance_to(T.centroid(t)) or f is not g
        f = g
    assert f.distance_to((8, 5)) == pytest.approx(2 * math.sqrt(5) + 2, abs=1e-12)
    assert f.path_to((8, 5)) == funnel_shortest(s, (2, 5), (8, 5))


def test_walk_and_homotopic_shortest():
    T = triangulate(single_square())
    above = [(2, 5), (3, 8), (5, 9.5), (7, 8), (8, 5)]
    path = homotopic_shortest(T, above)
    assert path == ((2, 5), (4, 6), (6, 6), (8, 5))
    tris = walk_polyline(T, above)
    assert tris[0] == T.locate((2, 5))
    assert point_in_triangle((8, 5), *T.corners(tris[-1]))
    with pytest.raises(TriangulationError):
        walk_polyline(T, [(2, 5), (8, 5)])


def test_walk_along_obstacle_edge():
    T = triangulate(single_square())
    # runs exactly along two sides of the block and through its corners
    path = homotopic_shortest(T, [(8, 3), (6, 4), (6, 6), (4, 6), (2, 7)])
    assert path == ((8, 3), (6, 6), (2, 7))


def test_dump_is_json():
    T = triangulate(single_square())
    G = dual_graph(T, (2, 5), single_square().generators)
    doc = json.loads(dump_triangulation(T, G))
    assert len(doc["triangles"]) == 8 and len(doc["vertices"]) == 8
    assert doc["dual"]["anchor_triangle"] == G.anchor_triangle
