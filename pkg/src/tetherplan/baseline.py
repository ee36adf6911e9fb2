"""Homotopy-augmented grid graph: the comparison baseline and reachability oracle.

Nodes are ``(cell, signature)`` pairs.  Starting from the anchor's cell, Dijkstra
expands to the 8 neighboring free cells with Euclidean center distances, updating
the signature whenever a move crosses a generator ray, and stops at length l.
"""

from __future__ import annotations

import csv
import heapq
import io
import math
import random
import time
from dataclasses import dataclass, field

import numpy as np
import shapely

from .cover import build_complex, preimage, distance_from_anchor
from .environment import ValidatedEnvironment
from .errors import PlanningError, TetherPlanError
from .geometry import Location, Point, point_in_polygon
from .homotopy import SignatureTable, concat, reduce, segment_crossings
from .triangulation import dual_graph, homotopic_shortest, triangulate

MOVES = tuple((di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if (di, dj) != (0, 0))

CSV_COLUMNS = (
    "env",
    "m",
    "l",
    "bar_T2_count",
    "bar_T_time_s",
    "grid_nodes_r0.5",
    "grid_time_r0.5_s",
    "grid_nodes_r0.25",
    "grid_time_r0.25_s",
    "agreement_pct",
)
TIME_COLUMNS = ("bar_T_time_s", "grid_time_r0.5_s", "grid_time_r0.25_s")


class GridBudgetExceeded(Exception):
    pass


@dataclass(eq=False)
class GridGraph:
    resolution: float
    origin: Point  # lower-left corner of cell (0, 0)
    free: np.ndarray  # bool [nx, ny]
    anchor: Point
    tether_length: float
    generators: tuple
    anchor_node: tuple = None
    sigs: SignatureTable = field(default_factory=SignatureTable)
    dist: dict = field(default_factory=dict)  # (i, j, signature id) -> settled distance
    pred: dict = field(default_factory=dict)  # (i, j, signature id) -> predecessor node or None

    @property
    def nodes(self):
        return self.dist.keys()

    def __len__(self) -> int:
        return len(self.dist)

    def center(self, i: int, j: int) -> Point:
        r = self.resolution
        return Point(self.origin[0] + (i + 0.5) * r, self.origin[1] + (j + 0.5) * r)

    def cell_of(self, p) -> tuple | None:
        r = self.resolution
        i = math.floor((p[0] - self.origin[0]) / r)
        j = math.floor((p[1] - self.origin[1]) / r)
        nx, ny = self.free.shape
        if 0 <= i < nx and 0 <= j < ny:
            return i, j
        return None

    def signature(self, node) -> tuple:
        return self.sigs.word(node[2])

    def neighbors(self, node):
        """Edges out of ``node`` as ``(node, weight)`` (signatures updated on ray crossings)."""
        i, j, s = node
        nx, ny = self.free.shape
        a = self.center(i, j)
        for di, dj in MOVES:
            ii, jj = i + di, j + dj
            if 0 <= ii < nx and 0 <= jj < ny and self.free[ii, jj]:
                if di and dj and not (self.free[ii, j] and self.free[i, jj]):
                    continue
                b = self.center(ii, jj)
                word = segment_crossings(a, b, self.generators)
                yield (ii, jj, self.sigs.extend(s, word)), math.hypot(b[0] - a[0], b[1] - a[1])

    def cell_path(self, node) -> list:
        """Cell centers from the anchor cell to ``node`` along the Dijkstra tree."""
        out = []
        while node is not None:
            out.append(self.center(node[0], node[1]))
            node = self.pred[node]
        out.reverse()
        return out


def occupancy(venv: ValidatedEnvironment, resolution: float) -> tuple:
    """Free-cell mask: a cell is free iff it lies in the workspace and its interior
    misses every obstacle."""
    x0, y0, x1, y1 = venv.workspace.bbox()
    nx = max(1, math.ceil((x1 - x0) / resolution - 1e-9))
    ny = max(1, math.ceil((y1 - y0) / resolution - 1e-9))
    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="ij")
    boxes = shapely.box(
        x0 + ii.ravel() * resolution,
        y0 + jj.ravel() * resolution,
        x0 + (ii.ravel() + 1) * resolution,
        y0 + (jj.ravel() + 1) * resolution,
    )
    ws = shapely.Polygon(venv.workspace.vertices)
    free = shapely.covered_by(boxes, ws)
    for obs in venv.obstacles:
        op = shapely.Polygon(obs.vertices)
        free &= ~shapely.relate_pattern(boxes, op, "T********")
    return Point(x0, y0), free.reshape(nx, ny)


def build_grid_graph(
    venv: ValidatedEnvironment, resolution: float, tether_length: float | None = None, deadline: float | None = None
) -> GridGraph:
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    l = venv.tether_length if tether_length is None else float(tether_length)
    origin, free = occupancy(venv, resolution)
    g = GridGraph(resolution, origin, free, venv.anchor, l, venv.generators)
    cell = g.cell_of(venv.anchor)
    if cell is None or not free[cell]:
        raise PlanningError("ANCHOR_CELL_BLOCKED", f"the anchor's grid cell is not free at resolution {resolution}")
    gens = venv.generators
    nx, ny = free.shape
    r = resolution
    ox, oy = origin
    # crossing words per (cell, move), filled lazily
    cross: dict = {}
    weights = [math.hypot(di * r, dj * r) for di, dj in MOVES]

    sigs = g.sigs
    start_sig = sigs.intern(reduce(segment_crossings(venv.anchor, g.center(*cell), gens)))
    start = (cell[0], cell[1], start_sig)
    g.anchor_node = start
    best = {start: 0.0}
    g.pred[start] = None
    heap = [(0.0, start)]
    settled = g.dist
    pops = 0
    while heap:
        d, node = heapq.heappop(heap)
        if node in settled:
            continue
        settled[node] = d
        pops += 1
        if deadline is not None and pops % 4096 == 0 and time.perf_counter() > deadline:
            raise GridBudgetExceeded(f"grid expansion exceeded its time budget at {len(settled)} nodes")
        i, j, s = node
        for k, (di, dj) in enumerate(MOVES):
            ii, jj = i + di, j + dj
            if not (0 <= ii < nx and 0 <= jj < ny) or not free[ii, jj]:
                continue
            # no corner cutting: a diagonal step could graze an obstacle vertex
            if di and dj and not (free[ii, j] and free[i, jj]):
                continue
            nd = d + weights[k]
            if nd > l:
                continue
            key = (i, j, k)
            word = cross.get(key)
            if word is None:
                a = Point(ox + (i + 0.5) * r, oy + (j + 0.5) * r)
                b = Point(ox + (ii + 0.5) * r, oy + (jj + 0.5) * r)
                word = cross[key] = reduce(segment_crossings(a, b, gens))
            nxt = (ii, jj, sigs.extend(s, word) if word else s)
            if nxt in settled:
                continue
            if nd < best.get(nxt, math.inf):
                best[nxt] = nd
                g.pred[nxt] = node
                heapq.heappush(heap, (nd, nxt))
    g.pred = {n: g.pred[n] for n in settled}
    return g


def grid_nodes_at(g: GridGraph, p) -> list:
    """Graph nodes in the cell containing ``p``."""
    cell = g.cell_of(p)
    if cell is None:
        return []
    return sorted((n for n in g.dist if n[0] == cell[0] and n[1] == cell[1]), key=lambda n: g.dist[n])


def grid_reachable_signatures(g: GridGraph, p) -> set:
    """Classes of paths from the anchor to ``p`` realized by nodes of ``p``'s cell.

    A node's signature describes paths ending at the cell center; the straight hop
    from the center to ``p`` (inside the free cell) is appended.
    """
    out = set()
    for n in grid_nodes_at(g, p):
        c = g.center(n[0], n[1])
        out.add(concat(g.signature(n), reduce(segment_crossings(c, p, g.generators))))
    return out


def grid_class_lengths(g: GridGraph, T, p) -> dict:
    """Exact taut length for each class found by the grid at ``p``."""
    out = {}
    for n in grid_nodes_at(g, p):
        c = g.center(n[0], n[1])
        sig = concat(g.signature(n), reduce(segment_crossings(c, p, g.generators)))
        if sig in out:
            continue
        poly = [g.anchor] + g.cell_path(n) + [Point(*p)]
        taut = homotopic_shortest(T, poly)
        out[sig] = sum(math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in zip(taut, taut[1:]))
    return out


def sample_free_points(venv: ValidatedEnvironment, n: int, rng: random.Random) -> list:
    x0, y0, x1, y1 = venv.workspace.bbox()
    out = []
    while len(out) < n:
        p = Point(rng.uniform(x0, x1), rng.uniform(y0, y1))
        if point_in_polygon(p, venv.workspace) is not Location.INSIDE:
            continue
        if any(point_in_polygon(p, o) is not Location.OUTSIDE for o in venv.obstacles):
            continue
        out.append(p)
    return out


def class_agreement(c, g: GridGraph, T, points, guard: float) -> tuple:
    """Compare cover and grid class sets at each point away from the length frontier.

    A point is judged only if every class either side reports has an exact taut
    length at least ``guard`` away from l.  Returns ``(agreeing, judged, details)``.
    """
    l = c.tether_length
    agree = judged = 0
    details = []
    for p in points:
        cover = {lp.point_signature: distance_from_anchor(c, lp) for lp in preimage(c, p)}
        grid = grid_class_lengths(g, T, p)
        lengths = {**grid, **cover}
        if any(abs(v - l) < guard for v in lengths.values()):
            continue
        judged += 1
        same = set(cover) == set(grid)
        agree += same
        details.append((p, sorted(cover), sorted(grid), same))
    return agree, judged, details


@dataclass
class ComparisonReport:
    env: str
    m: int
    l: float
    cover_triangles: int
    cover_time: float
    grid: dict = field(default_factory=dict)  # resolution -> (nodes, seconds) or None if skipped
    agreement_pct: float | None = None
    error: str | None = None

    def row(self) -> dict:
        def fmt(v, digits=4):
            return "" if v is None else (f"{v:.{digits}f}" if isinstance(v, float) else str(v))

        out = {
            "env": self.env,
            "m": str(self.m),
            "l": f"{self.l:g}",
            "bar_T2_count": fmt(self.cover_triangles),
            "bar_T_time_s": fmt(self.cover_time),
        }
        for r, tag in ((0.5, "0.5"), (0.25, "0.25")):
            entry = self.grid.get(r)
            out[f"grid_nodes_r{tag}"] = "skipped" if entry is None and r in self.grid else fmt(entry and entry[0])
            out[f"grid_time_r{tag}_s"] = "" if entry is None else fmt(entry[1])
        out["agreement_pct"] = fmt(self.agreement_pct, 2)
        if self.error:
            out["bar_T2_count"] = f"error: {self.error}"
        return out


def time_cover(venv: ValidatedEnvironment, l: float) -> tuple:
    t0 = time.perf_counter()
    T = triangulate(venv)
    G = dual_graph(T, venv.anchor, venv.generators)
    c = build_complex(T, G, venv.anchor, l, venv.generators)
    return c, T, time.perf_counter() - t0


def compare(
    venv: ValidatedEnvironment,
    l: float,
    resolutions=(0.5, 0.25),
    *,
    name: str = "",
    samples: int = 20,
    seed: int = 0,
    budget_s: float = 120.0,
    skip=(),
) -> ComparisonReport:
    """Build the cover and each grid for one (environment, l) configuration.

    Resolutions listed in ``skip`` (projected too slow) are not built; a grid that
    runs past ``budget_s`` is abandoned and reported as skipped.
    """
    venv = venv.with_length(l)
    c, T, tc = time_cover(venv, l)
    report = ComparisonReport(name, venv.m, l, c.n_triangles, tc)
    finest = None
    for r in resolutions:
        if r in skip:
            report.grid[r] = None
            continue
        t0 = time.perf_counter()
        try:
            g = build_grid_graph(venv, r, l, deadline=t0 + budget_s)
        except GridBudgetExceeded:
            report.grid[r] = None
            continue
        report.grid[r] = (len(g), time.perf_counter() - t0)
        if finest is None or r < finest[0]:
            finest = (r, g)
    if finest is not None and samples > 0:
        r, g = finest
        pts = sample_free_points(venv, samples, random.Random(seed))
        agree, judged, _ = class_agreement(c, g, T, pts, guard=2 * math.sqrt(2) * r)
        report.agreement_pct = 100.0 * agree / judged if judged else None
    return report


def write_csv(reports, stream=None) -> str:
    stream = stream or io.StringIO()
    w = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for rep in reports:
        w.writerow(rep.row())
    return stream.getvalue() if isinstance(stream, io.StringIO) else ""


def error_report(name: str, venv: ValidatedEnvironment, l: float, exc: TetherPlanError) -> ComparisonReport:
    return ComparisonReport(name, venv.m, l, 0, 0.0, error=exc.code)
