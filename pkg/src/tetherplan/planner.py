"""Planning on the cover: lift the current tether, enumerate the goal's reachable
homotopy classes, and compute a path and the post-motion tether for each."""

from __future__ import annotations

import enum
import heapq
import json
from dataclasses import dataclass

from .cover import (
    CoverComplex,
    LiftedPoint,
    anchor_point,
    distance_from_anchor,
    lift_path,
    preimage,
    shortest_in_cover,
)
from .errors import CoverError, PlanningError, TriangulationError
from .geometry import EPS, Point, dist, polyline_length, simplify_polyline
from .homotopy import format_signature, sort_key
from .triangulation import Triangulation, homotopic_shortest, walk_polyline

# equal-length classes are ordered by signature; lengths closer than this count as equal
LENGTH_TIE = 1e-9


class SearchMode(enum.Enum):
    PRIMAL = "primal"
    DUAL = "dual"


@dataclass(frozen=True)
class PlanQuery:
    tether: tuple  # current tether from the anchor to the robot
    goal: Point

    @property
    def robot(self) -> Point:
        return Point(*self.tether[-1])


@dataclass(frozen=True)
class PlanResult:
    path: tuple
    path_length: float
    goal_signature: tuple
    resulting_tether: tuple
    resulting_tether_length: float


def _rank_key(length: float, sig: tuple):
    return (round(length / LENGTH_TIE), sort_key(sig))


def resulting_tether(T: Triangulation, tether, path) -> tuple:
    """Taut tether after dragging it along ``path`` (shortest path homotopic to tether + path)."""
    tether = [Point(*p) for p in tether]
    path = [Point(*p) for p in path]
    if path and tether and path[0] != tether[-1]:
        raise PlanningError("TETHER_INFEASIBLE", "the path does not start at the tether's end")
    return homotopic_shortest(T, tether + path[1:])


def _primal_search(c: CoverComplex, a: LiftedPoint, b: LiftedPoint) -> tuple:
    adj = c.primal_graph()
    verts = c.triangulation.vertices
    n = c.n_vertices
    src, dst = n, n + 1

    def point(i):
        if i == src:
            return a.point
        if i == dst:
            return b.point
        return verts[c.vert_base[i]]

    extra = {src: [(v, dist(a.point, point(v))) for v in c.corners[a.copy]]}
    into_dst = {v: dist(point(v), b.point) for v in c.corners[b.copy]}
    if a.copy == b.copy:
        extra[src].append((dst, dist(a.point, b.point)))

    best = {src: 0.0}
    pred = {}
    heap = [(0.0, src)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > best.get(u, float("inf")):
            continue
        if u == dst:
            break
        out = extra.get(u) if u == src else adj[u]
        if u in into_dst:
            out = list(out) + [(dst, into_dst[u])]
        for v, w in out:
            nd = d + w
            if nd < best.get(v, float("inf")):
                best[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    seq = [dst]
    while seq[-1] != src:
        seq.append(pred[seq[-1]])
    pts = tuple(point(i) for i in reversed(seq))
    return simplify_polyline(pts), best[dst]


def search_on_graph(c: CoverComplex, mode: SearchMode, a: LiftedPoint, b: LiftedPoint) -> tuple:
    """Path between two lifted points, projected to the base, and its length.

    DUAL follows the unique dual-tree path and pulls it taut; PRIMAL runs Dijkstra
    over lifted triangulation vertices and edges.
    """
    if a.copy == b.copy and a.point == b.point:
        return (a.point,), 0.0
    if mode is SearchMode.PRIMAL:
        return _primal_search(c, a, b)
    return shortest_in_cover(c, a, b)


def rank_homotopy_classes(c: CoverComplex, p) -> list:
    """``(signature, taut length)`` for every class reaching ``p`` within the tether length."""
    out = [(lp.point_signature, distance_from_anchor(c, lp)) for lp in preimage(c, p)]
    out.sort(key=lambda e: _rank_key(e[1], e[0]))
    return out


def _check_tether(c: CoverComplex, tether) -> None:
    if not tether:
        raise PlanningError("TETHER_INFEASIBLE", "empty tether")
    if dist(tether[0], c.anchor) > EPS:
        raise PlanningError("TETHER_INFEASIBLE", f"tether starts at {tuple(tether[0])}, not at the anchor")
    length = polyline_length(tether)
    if length > c.tether_length + LENGTH_TIE:
        raise PlanningError("TETHER_INFEASIBLE", f"tether length {length:.6g} exceeds {c.tether_length:g}")
    try:
        walk_polyline(c.triangulation, tether)
    except TriangulationError as exc:
        raise PlanningError("TETHER_INFEASIBLE", f"tether leaves the free workspace: {exc.message}") from None


def plan(c: CoverComplex, q: PlanQuery, mode: SearchMode = SearchMode.DUAL) -> list:
    """Ranked plans, one per homotopy class in which the goal is reachable."""
    tether = tuple(Point(*p) for p in q.tether)
    _check_tether(c, tether)
    # starts within EPS of the anchor: use the anchor itself
    tether = (Point(*c.anchor),) + tether[1:]
    try:
        robot = lift_path(c, tether)
    except (CoverError, TriangulationError) as exc:
        raise PlanningError("TETHER_INFEASIBLE", exc.message) from None
    try:
        goals = preimage(c, q.goal)
    except TriangulationError:
        raise PlanningError("GOAL_UNREACHABLE", f"goal {tuple(q.goal)} is not in the free workspace") from None
    if not goals:
        raise PlanningError("GOAL_UNREACHABLE", f"goal {tuple(q.goal)} is beyond the tether length in every class")

    results = []
    for g in goals:
        path, length = search_on_graph(c, mode, robot, g)
        taut, taut_len = shortest_in_cover(c, anchor_point(c), g)
        results.append(PlanResult(tuple(path), length, g.point_signature, tuple(taut), taut_len))
    results.sort(key=lambda r: _rank_key(r.path_length, r.goal_signature))
    return results


def plan_report(results) -> str:
    doc = [
        {
            "rank": i + 1,
            "signature": format_signature(r.goal_signature),
            "path_length": r.path_length,
            "resulting_tether_length": r.resulting_tether_length,
            "path": [list(p) for p in r.path],
            "tether": [list(p) for p in r.resulting_tether],
        }
        for i, r in enumerate(results)
    ]
    return json.dumps(doc, indent=1) + "\n"
