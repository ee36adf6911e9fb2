"""Constrained Delaunay triangulation of the free workspace, its dual graph,
sleeves and homotopic shortest paths through them.

The triangulation never inserts Steiner points: its vertices are exactly the
workspace and obstacle vertices.  Construction is Bowyer-Watson insertion in
lexicographic order, constraint recovery by edge flips, then Lawson flips to
restore the constrained Delaunay property.  All decisions use exact predicates.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from functools import cached_property

from .errors import TriangulationError
from .environment import ValidatedEnvironment
from .funnel import Funnel
from .geometry import (
    EPS,
    Location,
    Point,
    incircle_sign,
    on_segment,
    orient_sign,
    point_in_polygon,
    point_in_triangle,
    segments_cross,
    strictly_between,
)


class _Mesh:
    """Half-edge-ish mesh: ``opp[(a, b)]`` is the third vertex of the CCW triangle
    containing the directed edge ``a -> b``."""

    def __init__(self, pts):
        self.pts = pts
        self.opp: dict = {}
        self.last = None

    def add(self, a, b, c):
        opp = self.opp
        opp[(a, b)] = c
        opp[(b, c)] = a
        opp[(c, a)] = b
        self.last = (a, b, c)

    def remove(self, a, b, c):
        opp = self.opp
        del opp[(a, b)]
        del opp[(b, c)]
        del opp[(c, a)]

    def flip(self, a, b):
        c = self.opp[(a, b)]
        d = self.opp[(b, a)]
        self.remove(a, b, c)
        self.remove(b, a, d)
        self.add(a, d, c)
        self.add(b, c, d)
        return c, d

    def locate(self, p):
        pts = self.pts
        t = self.last
        if t is not None and t[:2] in self.opp and self.opp[t[:2]] == t[2]:
            for _ in range(4 * len(self.opp) + 10):
                a, b, c = t
                for u, v in ((a, b), (b, c), (c, a)):
                    if orient_sign(pts[u], pts[v], p) < 0:
                        w = self.opp.get((v, u))
                        if w is None:
                            break
                        t = (v, u, w)
                        break
                else:
                    return t
        for (a, b), c in self.opp.items():
            if point_in_triangle(p, pts[a], pts[b], pts[c]):
                return (a, b, c)
        raise TriangulationError("DEGENERATE_INPUT", f"cannot locate {p} during construction")

    def insert(self, i):
        pts = self.pts
        p = pts[i]
        opp = self.opp
        start = self.locate(p)
        bad = {_canon(start)}
        stack = [start]
        while stack:
            a, b, c = stack.pop()
            for u, v in ((a, b), (b, c), (c, a)):
                w = opp.get((v, u))
                if w is None:
                    continue
                key = _canon((v, u, w))
                if key in bad:
                    continue
                if incircle_sign(pts[v], pts[u], pts[w], p) > 0:
                    bad.add(key)
                    stack.append((v, u, w))
        boundary = []
        for a, b, c in bad:
            for u, v in ((a, b), (b, c), (c, a)):
                w = opp.get((v, u))
                if w is None or _canon((v, u, w)) not in bad:
                    boundary.append((u, v))
        for tri in bad:
            self.remove(*tri)
        for u, v in boundary:
            if orient_sign(pts[u], pts[v], p) <= 0:
                raise TriangulationError("DEGENERATE_INPUT", f"point {p} creates a degenerate triangle")
            self.add(u, v, i)

    def insert_segment(self, u, v):
        opp = self.opp
        if (u, v) in opp or (v, u) in opp:
            return
        pts = self.pts
        pu, pv = pts[u], pts[v]
        queue = deque(
            (a, b) for (a, b) in opp if a < b and (b, a) in opp and segments_cross(pu, pv, pts[a], pts[b])
        )
        budget = 50 * (len(queue) + 1) ** 2 + 1000
        while queue:
            budget -= 1
            if budget < 0:
                raise TriangulationError("DEGENERATE_INPUT", f"cannot recover constraint {pu}-{pv}")
            a, b = queue.popleft()
            c = opp.get((a, b))
            d = opp.get((b, a))
            if c is None or d is None:
                continue
            if segments_cross(pts[c], pts[d], pts[a], pts[b]):
                self.flip(a, b)
                if segments_cross(pu, pv, pts[c], pts[d]):
                    queue.append((c, d))
            else:
                queue.append((a, b))
        if (u, v) not in opp and (v, u) not in opp:
            raise TriangulationError("DEGENERATE_INPUT", f"constraint {pu}-{pv} missing after recovery")

    def make_delaunay(self, constrained):
        pts = self.pts
        opp = self.opp
        stack = [(a, b) for (a, b) in opp if a < b and (b, a) in opp]
        while stack:
            a, b = stack.pop()
            if (min(a, b), max(a, b)) in constrained:
                continue
            c = opp.get((a, b))
            d = opp.get((b, a))
            if c is None or d is None:
                continue
            if incircle_sign(pts[a], pts[b], pts[c], pts[d]) > 0:
                self.flip(a, b)
                stack.extend(((a, d), (d, b), (b, c), (c, a)))


def _canon(t):
    a, b, c = t
    if a < b and a < c:
        return t
    if b < c:
        return (b, c, a)
    return (c, a, b)


@dataclass(frozen=True, eq=False)
class Triangulation:
    vertices: tuple
    triangles: tuple  # CCW index triples, smallest index first, sorted
    edges: tuple  # sorted (i, j) with i < j
    constrained: frozenset
    neighbors: tuple  # neighbors[t][k]: triangle across the edge opposite corner k, or -1
    n_holes: int = 0

    @cached_property
    def _edge_to_tris(self) -> dict:
        out: dict = {}
        for t, (a, b, c) in enumerate(self.triangles):
            for u, v in ((a, b), (b, c), (c, a)):
                out.setdefault((min(u, v), max(u, v)), []).append(t)
        return out

    @cached_property
    def vertex_triangles(self) -> tuple:
        out = [[] for _ in self.vertices]
        for t, tri in enumerate(self.triangles):
            for v in tri:
                out[v].append(t)
        return tuple(tuple(x) for x in out)

    def corners(self, t):
        vs = self.vertices
        a, b, c = self.triangles[t]
        return vs[a], vs[b], vs[c]

    def contains(self, t, p) -> bool:
        return point_in_triangle(p, *self.corners(t))

    def centroid(self, t) -> Point:
        a, b, c = self.corners(t)
        return Point((a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0)

    def adjacent(self, t, u) -> bool:
        return u in self.neighbors[t]

    def shared_edge(self, t, u):
        """Directed shared edge ``(i, j)`` as it appears (CCW) in triangle ``t``."""
        tri = self.triangles[t]
        k = self.neighbors[t].index(u)
        return tri[(k + 1) % 3], tri[(k + 2) % 3]

    def portal(self, t, u):
        """``(left, right)`` endpoints of the edge crossed when moving from ``t`` into ``u``."""
        i, j = self.shared_edge(t, u)
        return self.vertices[j], self.vertices[i]

    def locate_all(self, p) -> list:
        return [t for t in range(len(self.triangles)) if self.contains(t, p)]

    def locate(self, p) -> int:
        """Lowest-id triangle whose closed region contains ``p``."""
        for t in range(len(self.triangles)):
            if self.contains(t, p):
                return t
        raise TriangulationError("POINT_NOT_IN_FREE_SPACE", f"{tuple(p)} is not in the free workspace")

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges) + len(self.triangles)


def triangulate(venv: ValidatedEnvironment) -> Triangulation:
    polys = [venv.workspace, *venv.obstacles]
    raw = sorted({Point(*v) for poly in polys for v in poly.vertices})
    index = {p: i for i, p in enumerate(raw)}
    segments = set()
    for poly in polys:
        for a, b in poly.edges():
            ia, ib = index[a], index[b]
            inner = [k for k, p in enumerate(raw) if strictly_between(p, a, b)]
            inner.sort(key=lambda k: (raw[k][0] - a[0]) ** 2 + (raw[k][1] - a[1]) ** 2)
            chain = [ia, *inner, ib]
            for s, t in zip(chain, chain[1:]):
                segments.add((min(s, t), max(s, t)))

    xs = [p[0] for p in raw]
    ys = [p[1] for p in raw]
    cx, cy = (min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
    n = len(raw)
    pts = list(raw) + [
        Point(cx - 20 * span, cy - 10 * span),
        Point(cx + 20 * span, cy - 10 * span),
        Point(cx, cy + 20 * span),
    ]
    mesh = _Mesh(pts)
    mesh.add(n, n + 1, n + 2)
    for i in range(n):
        mesh.insert(i)
    for u, v in sorted(segments):
        mesh.insert_segment(u, v)
    mesh.make_delaunay(segments)

    free = []
    for (a, b), c in mesh.opp.items():
        if not (a < b and a < c) or c >= n or b >= n:
            continue
        if a >= n:
            continue
        g = ((pts[a][0] + pts[b][0] + pts[c][0]) / 3.0, (pts[a][1] + pts[b][1] + pts[c][1]) / 3.0)
        if point_in_polygon(g, venv.workspace) is not Location.INSIDE:
            continue
        if any(point_in_polygon(g, obs) is not Location.OUTSIDE for obs in venv.obstacles):
            continue
        free.append((a, b, c))
    if not free:
        raise TriangulationError("DEGENERATE_INPUT", "no free triangles")

    used = sorted({v for tri in free for v in tri})
    remap = {old: new for new, old in enumerate(used)}
    triangles = sorted(_canon(tuple(remap[v] for v in tri)) for tri in free)
    vertices = tuple(raw[i] for i in used)
    edge_tris: dict = {}
    for t, (a, b, c) in enumerate(triangles):
        for u, v in ((a, b), (b, c), (c, a)):
            edge_tris.setdefault((min(u, v), max(u, v)), []).append(t)
    # constraints with no free triangle on either side (an obstacle edge lying
    # on the workspace boundary) are not part of the free triangulation
    constrained = set()
    for a, b in segments:
        if a in remap and b in remap:
            key = (min(remap[a], remap[b]), max(remap[a], remap[b]))
            if key in edge_tris:
                constrained.add(key)
    neighbors = []
    for t, (a, b, c) in enumerate(triangles):
        row = []
        for u, v in ((b, c), (c, a), (a, b)):
            key = (min(u, v), max(u, v))
            others = [x for x in edge_tris[key] if x != t]
            row.append(-1 if key in constrained or not others else others[0])
        neighbors.append(tuple(row))

    seen = {0}
    queue = deque([0])
    while queue:
        t = queue.popleft()
        for u in neighbors[t]:
            if u >= 0 and u not in seen:
                seen.add(u)
                queue.append(u)
    if len(seen) != len(triangles):
        raise TriangulationError("CONNECTIVITY_ERROR", "the free workspace is not connected")

    return Triangulation(
        vertices=vertices,
        triangles=tuple(triangles),
        edges=tuple(sorted(edge_tris)),
        constrained=frozenset(constrained),
        neighbors=tuple(neighbors),
        n_holes=len(venv.relevant),
    )


@dataclass(frozen=True)
class DualGraph:
    reps: tuple  # one representative point per triangle
    edges: tuple  # (t, u) with t < u, triangles sharing an unconstrained edge
    anchor_triangle: int


def _on_any_ray(p, generators) -> bool:
    return any(on_segment(p, g.origin, g.far) for g in generators)


def dual_graph(T: Triangulation, anchor, generators) -> DualGraph:
    anchor = Point(*anchor)
    anchor_tri = T.locate(anchor)
    reps = []
    shift = 10 * EPS
    for t in range(len(T.triangles)):
        if t == anchor_tri:
            reps.append(anchor)
            continue
        c = T.centroid(t)
        if _on_any_ray(c, generators):
            g = next(g for g in generators if on_segment(c, g.origin, g.far))
            nx, ny = -g.direction[1], g.direction[0]
            for sgn in (1.0, -1.0):
                cand = Point(c[0] + sgn * shift * nx, c[1] + sgn * shift * ny)
                corners = T.corners(t)
                inside = all(orient_sign(corners[k], corners[(k + 1) % 3], cand) > 0 for k in range(3))
                if inside and not _on_any_ray(cand, generators):
                    c = cand
                    break
            else:
                raise TriangulationError("DEGENERATE_INPUT", f"cannot place representative of triangle {t}")
        reps.append(c)
    edges = sorted({(min(t, u), max(t, u)) for t, row in enumerate(T.neighbors) for u in row if u >= 0})
    return DualGraph(tuple(reps), tuple(edges), anchor_tri)


@dataclass(frozen=True)
class Sleeve:
    triangulation: Triangulation
    triangles: tuple

    def reversed(self) -> "Sleeve":
        return Sleeve(self.triangulation, tuple(reversed(self.triangles)))

    def boundary_edges(self) -> list:
        """Edges of the sleeve polygon (triangle edges not used as portals)."""
        T = self.triangulation
        portals = set()
        for t, u in zip(self.triangles, self.triangles[1:]):
            i, j = T.shared_edge(t, u)
            portals.add((min(i, j), max(i, j)))
        out = []
        for t in self.triangles:
            a, b, c = T.triangles[t]
            for u, v in ((a, b), (b, c), (c, a)):
                if (min(u, v), max(u, v)) not in portals:
                    out.append((T.vertices[u], T.vertices[v]))
        return out


def collapse_backtracks(walk) -> list:
    """Remove immediate returns ``t, u, t -> t`` (and repeats ``t, t -> t``) until none remain."""
    out: list = []
    for t in walk:
        if out and out[-1] == t:
            continue
        if len(out) >= 2 and out[-2] == t:
            out.pop()
            continue
        out.append(t)
    return out


def sleeve_between(T: Triangulation, dual_path) -> Sleeve:
    tris = collapse_backtracks(list(dual_path))
    if not tris:
        raise TriangulationError("NOT_A_SLEEVE", "empty dual path")
    for t, u in zip(tris, tris[1:]):
        if not T.adjacent(t, u):
            raise TriangulationError("NOT_A_SLEEVE", f"triangles {t} and {u} are not adjacent")
    return Sleeve(T, tuple(tris))


def sleeve_funnel(T: Triangulation, tris, source) -> Funnel:
    f = Funnel.start(source)
    for t, u in zip(tris, tris[1:]):
        f = f.extend(*T.portal(t, u))
    return f


def funnel_shortest(sleeve: Sleeve, a, b) -> tuple:
    """Shortest path from ``a`` to ``b`` inside the sleeve polygon."""
    T = sleeve.triangulation
    tris = sleeve.triangles
    if not tris:
        raise TriangulationError("SLEEVE_INVALID", "empty sleeve")
    for t, u in zip(tris, tris[1:]):
        if not T.adjacent(t, u):
            raise TriangulationError("SLEEVE_INVALID", f"triangles {t} and {u} are not adjacent")
    if not T.contains(tris[0], a):
        raise TriangulationError("SLEEVE_INVALID", f"{tuple(a)} is not in the first triangle")
    if not T.contains(tris[-1], b):
        raise TriangulationError("SLEEVE_INVALID", f"{tuple(b)} is not in the last triangle")
    return sleeve_funnel(T, tris, a).path_to(Point(*b))


def _fan_route(T: Triangulation, w: int, start: int, pred) -> list:
    """Triangles around vertex ``w`` from ``start`` (exclusive) to the first one
    satisfying ``pred``, walking across edges incident to ``w``."""
    if pred(start):
        return []
    best = None
    for first_step in range(2):
        route = []
        prev, cur = -1, start
        for _ in range(len(T.vertex_triangles[w])):
            nxt = None
            tri = T.triangles[cur]
            k = tri.index(w)
            # the two neighbors of cur sharing an edge incident to w
            cands = [T.neighbors[cur][(k + 1) % 3], T.neighbors[cur][(k + 2) % 3]]
            if prev == -1:
                nxt = cands[first_step]
            else:
                nxt = next((c for c in cands if c != prev), -1)
            if nxt is None or nxt < 0:
                break
            route.append(nxt)
            prev, cur = cur, nxt
            if pred(cur):
                if best is None or len(route) < len(best):
                    best = route
                break
    if best is None:
        raise TriangulationError("POINT_NOT_IN_FREE_SPACE", f"path leaves the free workspace at {T.vertices[w]}")
    return best


def _walk_segment(T: Triangulation, t: int, a, b, out: list) -> int:
    """Follow segment ``a -> b`` from triangle ``t``, appending entered triangles to ``out``."""
    verts = T.vertices
    cur = a
    at = next((v for v in T.triangles[t] if verts[v] == a), None)
    for _ in range(8 * len(T.triangles) + 8):
        if T.contains(t, b):
            return t
        if at is not None:
            wp = verts[at]

            def sector(x, w=at, wp=wp):
                tri = T.triangles[x]
                k = tri.index(w)
                return (
                    orient_sign(wp, verts[tri[(k + 1) % 3]], b) >= 0
                    and orient_sign(wp, verts[tri[(k + 2) % 3]], b) <= 0
                )

            route = _fan_route(T, at, t, sector)
            out.extend(route)
            if route:
                t = route[-1]
            if T.contains(t, b):
                return t
            tri = T.triangles[t]
            k = tri.index(at)
            x, y = tri[(k + 1) % 3], tri[(k + 2) % 3]
            cur = wp
            if orient_sign(wp, verts[x], b) == 0:
                at = x
                continue
            if orient_sign(wp, verts[y], b) == 0:
                at = y
                continue
            nb = T.neighbors[t][k]
            if nb < 0:
                raise TriangulationError(
                    "POINT_NOT_IN_FREE_SPACE", f"segment {tuple(a)}-{tuple(b)} crosses an obstacle"
                )
            t = nb
            out.append(t)
            at = None
            continue
        tri = T.triangles[t]
        moved = False
        for k in range(3):
            u, v = tri[k], tri[(k + 1) % 3]
            pu, pv = verts[u], verts[v]
            if orient_sign(pu, pv, b) >= 0:
                continue
            ou = orient_sign(cur, b, pu)
            ov = orient_sign(cur, b, pv)
            if ou == 0 and on_segment(pu, cur, b):
                at = u
            elif ov == 0 and on_segment(pv, cur, b):
                at = v
            elif ou < 0 < ov:
                nb = T.neighbors[t][(k + 2) % 3]
                if nb < 0:
                    raise TriangulationError(
                        "POINT_NOT_IN_FREE_SPACE", f"segment {tuple(a)}-{tuple(b)} crosses an obstacle"
                    )
                t = nb
                out.append(t)
            else:
                continue
            moved = True
            break
        if not moved:
            raise TriangulationError("POINT_NOT_IN_FREE_SPACE", f"segment {tuple(a)}-{tuple(b)} leaves free space")
    raise TriangulationError("DEGENERATE_INPUT", "triangle walk did not terminate")


def walk_polyline(T: Triangulation, points) -> list:
    """Sequence of triangles visited by a polyline lying in the free workspace."""
    t = T.locate(points[0])
    out = [t]
    for a, b in zip(points, points[1:]):
        if a == b:
            continue
        t = _walk_segment(T, t, a, b, out)
    return out


def homotopic_shortest(T: Triangulation, points) -> tuple:
    """Taut path homotopic (endpoints fixed) to the polyline ``points``."""
    tris = collapse_backtracks(walk_polyline(T, points))
    return sleeve_funnel(T, tris, points[0]).path_to(Point(*points[-1]))


def dump_triangulation(T: Triangulation, G: DualGraph | None = None) -> str:
    doc = {
        "vertices": [[i, v[0], v[1]] for i, v in enumerate(T.vertices)],
        "edges": [[i, j, (i, j) in T.constrained] for i, j in T.edges],
        "triangles": [[t, *tri, *T.neighbors[t]] for t, tri in enumerate(T.triangles)],
    }
    if G is not None:
        doc["dual"] = {
            "representatives": [[t, p[0], p[1]] for t, p in enumerate(G.reps)],
            "edges": [list(e) for e in G.edges],
            "anchor_triangle": G.anchor_triangle,
        }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"
