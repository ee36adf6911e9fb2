"""Truncated universal cover of the free workspace as a simplicial complex.

Each copy of a base triangle is tagged with the homotopy signature of the dual
path from the anchor to its representative point.  Copies are grown breadth
first from the anchor's triangle; a copy is kept only when all three of its
corners are reachable within the tether length in their own classes.  Accepted
copies are linked to the copy that discovered them, and since the lifted dual
graph of the cover is a tree these links are all of its edges.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .errors import CoverError, TriangulationError
from .funnel import Funnel
from .geometry import Point, dist, polyline_length
from .homotopy import (
    SignatureTable,
    concat,
    format_signature,
    reduce,
    segment_crossings,
    signature_of_path,
    sort_key,
)
from .triangulation import DualGraph, Triangulation, sleeve_funnel


@dataclass(frozen=True)
class LiftedVertex:
    base_vertex: int
    signature: tuple


@dataclass(frozen=True)
class LiftedTriangle:
    base_triangle: int
    signature: tuple


@dataclass(frozen=True)
class LiftedPoint:
    copy: int  # index of the triangle copy in the complex
    base_triangle: int
    signature: tuple  # layer signature of the copy
    point: Point
    point_signature: tuple  # class of paths from the anchor to ``point`` through this copy


@dataclass(eq=False)
class CoverComplex:
    triangulation: Triangulation
    dual: DualGraph
    generators: tuple
    anchor: Point
    tether_length: float
    sigs: SignatureTable = field(default_factory=SignatureTable)
    tri_of: list = field(default_factory=list)  # base triangle per copy id, in discovery order
    sig_of: list = field(default_factory=list)  # interned layer signature per copy id
    corners: list = field(default_factory=list)  # three lifted-vertex ids per copy
    parent: list = field(default_factory=list)  # parent copy id, -1 for the anchor copy
    depth: list = field(default_factory=list)
    vert_base: list = field(default_factory=list)  # base vertex per lifted-vertex id
    vert_sig: list = field(default_factory=list)  # interned signature per lifted-vertex id
    vertex_distance: list = field(default_factory=list)
    edges: set = field(default_factory=set)  # lifted-vertex id pairs (i < j)
    copy_index: dict = field(default_factory=dict)  # (base triangle, signature id) -> copy id
    vertex_index: dict = field(default_factory=dict)  # (base vertex, signature id) -> lifted-vertex id
    by_triangle: dict = field(default_factory=dict)  # base triangle -> copy ids
    funnels: list = field(default_factory=list)  # funnel from the anchor into each copy
    _primal: list | None = field(default=None, repr=False)

    @property
    def anchor_copy(self) -> int:
        return 0

    @property
    def n_triangles(self) -> int:
        return len(self.tri_of)

    @property
    def n_vertices(self) -> int:
        return len(self.vert_base)

    def triangle(self, cid: int) -> LiftedTriangle:
        return LiftedTriangle(self.tri_of[cid], self.sigs.word(self.sig_of[cid]))

    def vertex(self, vid: int) -> LiftedVertex:
        return LiftedVertex(self.vert_base[vid], self.sigs.word(self.vert_sig[vid]))

    @property
    def copies(self) -> list:
        return [self.triangle(i) for i in range(self.n_triangles)]

    @property
    def vertices(self) -> list:
        return [self.vertex(i) for i in range(self.n_vertices)]

    def copy_id(self, t: int, signature) -> int | None:
        sid = self.sigs.find(signature)
        return None if sid is None else self.copy_index.get((t, sid))

    def vertex_id(self, v: int, signature) -> int | None:
        sid = self.sigs.find(signature)
        return None if sid is None else self.vertex_index.get((v, sid))

    def dual_edges(self) -> list:
        """Adjacent pairs of copies (the lifted dual graph)."""
        return [(p, c) for c, p in enumerate(self.parent) if p >= 0]

    def layers(self) -> dict:
        out: dict = {}
        for t, sid in zip(self.tri_of, self.sig_of):
            out.setdefault(sid, []).append(t)
        words = {sid: self.sigs.word(sid) for sid in out}
        return {words[sid]: sorted(out[sid]) for sid in sorted(out, key=lambda x: sort_key(words[x]))}

    def primal_graph(self) -> list:
        """Adjacency lists ``[(neighbor, length), ...]`` over lifted vertices."""
        if self._primal is None:
            pts = [self.triangulation.vertices[v] for v in self.vert_base]
            adj = [[] for _ in pts]
            for a, b in sorted(self.edges):
                w = dist(pts[a], pts[b])
                adj[a].append((b, w))
                adj[b].append((a, w))
            self._primal = adj
        return self._primal

    def euler_characteristic(self) -> int:
        return self.n_vertices - len(self.edges) + self.n_triangles

    def tree_path(self, a: int, b: int) -> list:
        """Copies on the unique dual-tree path from copy ``a`` to copy ``b``."""
        up, down = [a], [b]
        while up[-1] != down[-1]:
            if self.depth[up[-1]] >= self.depth[down[-1]]:
                up.append(self.parent[up[-1]])
            else:
                down.append(self.parent[down[-1]])
        down.pop()
        return up + down[::-1]

    def stats(self) -> dict:
        return {
            "vertices": self.n_vertices,
            "edges": len(self.edges),
            "triangles": self.n_triangles,
            "layers": len(set(self.sig_of)),
            "tether_length": self.tether_length,
        }


def _reps_signature(T: Triangulation, reps, generators, t: int, u: int) -> tuple:
    path = sleeve_funnel(T, (t, u), reps[t]).path_to(reps[u])
    return signature_of_path(path, generators)


def build_complex(T: Triangulation, G: DualGraph, anchor, l: float, generators) -> CoverComplex:
    anchor = Point(*anchor)
    t0 = G.anchor_triangle
    if not T.contains(t0, anchor):
        try:
            t0 = T.locate(anchor)
        except TriangulationError:
            raise CoverError("ANCHOR_NOT_IN_FREE_SPACE", f"{tuple(anchor)} is not in the free workspace") from None
    c = CoverComplex(T, G, tuple(generators), anchor, float(l))
    sigs = c.sigs
    reps = G.reps
    verts = T.vertices
    tris = T.triangles
    neighbors = [sorted(x for x in row if x >= 0) for row in T.neighbors]

    # base-level signature pieces, computed once per triangle corner / adjacent pair
    corner_word = [
        [reduce(segment_crossings(reps[t], verts[v], generators)) for v in tri] for t, tri in enumerate(tris)
    ]
    step_word: dict = {}

    distance: dict = {}  # (v, sid) -> shortest length in that class
    rejected: set = set()
    copy_index = c.copy_index
    vertex_index = c.vertex_index
    queue = deque([(t0, 0, -1)])
    while queue:
        t, s, par = queue.popleft()
        key = (t, s)
        if key in copy_index or key in rejected:
            continue
        if par < 0:
            f = Funnel.start(anchor)
        else:
            f = c.funnels[par].extend(*T.portal(c.tri_of[par], t))
        tri = tris[t]
        words = corner_word[t]
        corner_keys = []
        for k in range(3):
            w = words[k]
            vk = (tri[k], sigs.extend(s, w) if w else s)
            d = distance.get(vk)
            if d is None:
                d = distance[vk] = f.distance_to(verts[tri[k]])
            if d > l:
                break
            corner_keys.append(vk)
        if len(corner_keys) < 3:
            rejected.add(key)
            continue

        cid = len(c.tri_of)
        c.tri_of.append(t)
        c.sig_of.append(s)
        copy_index[key] = cid
        c.by_triangle.setdefault(t, []).append(cid)
        c.parent.append(par)
        c.depth.append(0 if par < 0 else c.depth[par] + 1)
        c.funnels.append(f)
        ids = []
        for vk in corner_keys:
            vid = vertex_index.get(vk)
            if vid is None:
                vid = vertex_index[vk] = len(c.vert_base)
                c.vert_base.append(vk[0])
                c.vert_sig.append(vk[1])
                c.vertex_distance.append(distance[vk])
            ids.append(vid)
        c.corners.append(tuple(ids))
        a, b, e = ids
        c.edges.update(((min(a, b), max(a, b)), (min(b, e), max(b, e)), (min(a, e), max(a, e))))

        for u in neighbors[t]:
            w = step_word.get((t, u))
            if w is None:
                w = step_word[(t, u)] = _reps_signature(T, reps, generators, t, u)
            nxt = (u, sigs.extend(s, w) if w else s)
            if nxt not in copy_index and nxt not in rejected:
                queue.append((nxt[0], nxt[1], cid))
    return c


def _point_class(c: CoverComplex, cid: int, p) -> tuple:
    rep = c.dual.reps[c.tri_of[cid]]
    return concat(c.sigs.word(c.sig_of[cid]), reduce(segment_crossings(rep, p, c.generators)))


def lifted_point(c: CoverComplex, cid: int, p) -> LiftedPoint:
    lt = c.triangle(cid)
    p = Point(*p)
    if not c.triangulation.contains(lt.base_triangle, p):
        raise CoverError("ELEMENT_NOT_IN_COMPLEX", f"{tuple(p)} is not in triangle {lt.base_triangle}")
    return LiftedPoint(cid, lt.base_triangle, lt.signature, p, _point_class(c, cid, p))


def anchor_point(c: CoverComplex) -> LiftedPoint:
    if not c.tri_of:
        raise CoverError("LIFT_EXCEEDS_TETHER", "the complex is empty")
    return lifted_point(c, 0, c.anchor)


def project(c: CoverComplex, elem):
    """Drop the signature component (the covering map)."""
    if isinstance(elem, LiftedVertex):
        if c.vertex_id(elem.base_vertex, elem.signature) is None:
            raise CoverError("ELEMENT_NOT_IN_COMPLEX", f"{elem} is not in the complex")
        return elem.base_vertex
    if isinstance(elem, LiftedTriangle):
        if c.copy_id(elem.base_triangle, elem.signature) is None:
            raise CoverError("ELEMENT_NOT_IN_COMPLEX", f"{elem} is not in the complex")
        return elem.base_triangle
    if isinstance(elem, LiftedPoint):
        if not (0 <= elem.copy < c.n_triangles) or c.tri_of[elem.copy] != elem.base_triangle:
            raise CoverError("ELEMENT_NOT_IN_COMPLEX", f"{elem} is not in the complex")
        return elem.point
    if isinstance(elem, (list, tuple)) and all(isinstance(e, LiftedPoint) for e in elem):
        return tuple(project(c, e) for e in elem)
    raise CoverError("ELEMENT_NOT_IN_COMPLEX", f"cannot project {elem!r}")


def lift_path(c: CoverComplex, path) -> LiftedPoint:
    """Endpoint of the unique lift of ``path`` (which starts at the anchor)."""
    T = c.triangulation
    path = [Point(*p) for p in path]
    if not path:
        raise CoverError("LIFT_EXCEEDS_TETHER", "empty path")
    end = path[-1]
    cands = T.locate_all(end)
    if not cands:
        raise TriangulationError("POINT_NOT_IN_FREE_SPACE", f"{tuple(end)} is not in the free workspace")
    for t in cands:
        s = signature_of_path(path + [c.dual.reps[t]], c.generators)
        cid = c.copy_id(t, s)
        if cid is not None:
            return lifted_point(c, cid, end)
    raise CoverError("LIFT_EXCEEDS_TETHER", "the path's class is not within the tether length")


def preimage(c: CoverComplex, p) -> list:
    """All lifts of ``p`` in the complex, one per homotopy class, ordered by copy id."""
    T = c.triangulation
    p = Point(*p)
    cands = T.locate_all(p)
    if not cands:
        raise TriangulationError("POINT_NOT_IN_FREE_SPACE", f"{tuple(p)} is not in the free workspace")
    seen = set()
    out = []
    for t in cands:
        for cid in c.by_triangle.get(t, ()):
            lp = lifted_point(c, cid, p)
            if lp.point_signature in seen:
                continue
            seen.add(lp.point_signature)
            out.append(lp)
    out.sort(key=lambda lp: lp.copy)
    return out


def cover_sleeve(c: CoverComplex, a: int, b: int) -> list:
    return [c.tri_of[x] for x in c.tree_path(a, b)]


def shortest_in_cover(c: CoverComplex, a: LiftedPoint, b: LiftedPoint) -> tuple:
    """Shortest path (projected to the base) between two lifted points and its length."""
    if a.copy == 0 and a.point == c.anchor:
        path = c.funnels[b.copy].path_to(b.point)
    else:
        tris = cover_sleeve(c, a.copy, b.copy)
        path = sleeve_funnel(c.triangulation, tris, a.point).path_to(b.point)
    return path, polyline_length(path)


def distance_from_anchor(c: CoverComplex, b: LiftedPoint) -> float:
    return c.funnels[b.copy].distance_to(b.point)


def dump_complex(c: CoverComplex) -> str:
    doc = {
        "tether_length": c.tether_length,
        "anchor": list(c.anchor),
        "counts": {"vertices": c.n_vertices, "edges": len(c.edges), "triangles": c.n_triangles},
        "layers": [{"signature": format_signature(s), "triangles": tris} for s, tris in c.layers().items()],
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"
