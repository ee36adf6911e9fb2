"""Hand-written SVG panels: environment, triangulation, cover layers, plans."""

from __future__ import annotations

import math

from .homotopy import format_signature

PANEL = 320
MARGIN = 12
CAPTION = 18


def _f(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


class _Panel:
    def __init__(self, venv, ox: float = 0.0, oy: float = 0.0, size: int = PANEL):
        x0, y0, x1, y1 = venv.workspace.bbox()
        self.x0, self.y1 = x0, y1
        self.scale = (size - 2 * MARGIN) / max(x1 - x0, y1 - y0, 1e-9)
        self.ox, self.oy = ox + MARGIN, oy + MARGIN
        self.items: list = []

    def xy(self, p) -> str:
        return f"{_f(self.ox + (p[0] - self.x0) * self.scale)},{_f(self.oy + (self.y1 - p[1]) * self.scale)}"

    def polygon(self, pts, style: str):
        self.items.append(f'<polygon points="{" ".join(self.xy(p) for p in pts)}" {style}/>')

    def polyline(self, pts, style: str):
        self.items.append(f'<polyline points="{" ".join(self.xy(p) for p in pts)}" fill="none" {style}/>')

    def line(self, a, b, style: str):
        self.polyline((a, b), style)

    def dot(self, p, r: float, style: str):
        x, y = self.xy(p).split(",")
        self.items.append(f'<circle cx="{x}" cy="{y}" r="{_f(r)}" {style}/>')

    def text(self, x: float, y: float, s: str):
        s = s.replace("&", "&amp;").replace("<", "&lt;")
        self.items.append(f'<text x="{_f(x)}" y="{_f(y)}" font-size="12" font-family="monospace">{s}</text>')


def _base(panel: _Panel, venv, generators: bool = True):
    panel.polygon(venv.workspace.vertices, 'fill="white" stroke="black" stroke-width="1.5"')
    for obs in venv.obstacles:
        panel.polygon(obs.vertices, 'fill="#777" stroke="black" stroke-width="1"')
    if generators:
        for g in venv.generators:
            panel.line(g.origin, g.far, 'stroke="#c22" stroke-width="1" stroke-dasharray="4,3"')
    panel.dot(venv.anchor, 4, 'fill="#16a"')


def _document(panels, width: int, height: int) -> str:
    body = "\n".join(item for p in panels for item in p.items)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">\n{body}\n</svg>\n'
    )


def render_environment(venv, tether=None) -> str:
    p = _Panel(venv)
    _base(p, venv)
    if tether:
        p.polyline(tether, 'stroke="black" stroke-width="1.5"')
        p.dot(tether[-1], 4, 'fill="#e80"')
    return _document([p], PANEL, PANEL)


def render_triangulation(venv, T, G=None) -> str:
    p = _Panel(venv)
    _base(p, venv, generators=False)
    for i, j in T.edges:
        style = 'stroke="black" stroke-width="2"' if (i, j) in T.constrained else 'stroke="#999" stroke-width="0.7"'
        p.line(T.vertices[i], T.vertices[j], style)
    if G is not None:
        for a, b in G.edges:
            p.line(G.reps[a], G.reps[b], 'stroke="#2a2" stroke-width="0.7" stroke-dasharray="2,2"')
        for r in G.reps:
            p.dot(r, 1.8, 'fill="#2a2"')
    for g in venv.generators:
        p.line(g.origin, g.far, 'stroke="#c22" stroke-width="1" stroke-dasharray="4,3"')
    p.dot(venv.anchor, 4, 'fill="#16a"')
    return _document([p], PANEL, PANEL)


def _grid(n: int) -> tuple:
    cols = max(1, math.ceil(math.sqrt(n)))
    rows = max(1, math.ceil(n / cols))
    return cols, rows


def render_layers(venv, c) -> str:
    """One panel per layer signature, shading that layer's base triangles."""
    layers = c.layers()
    cols, rows = _grid(len(layers))
    panels = []
    T = c.triangulation
    for k, (sig, tris) in enumerate(layers.items()):
        x, y = (k % cols) * PANEL, (k // cols) * (PANEL + CAPTION)
        p = _Panel(venv, x, y)
        _base(p, venv)
        for t in tris:
            p.polygon(T.corners(t), 'fill="#8bd" fill-opacity="0.6" stroke="#357" stroke-width="0.5"')
        p.text(x + MARGIN, y + PANEL + 4, f"[{format_signature(sig)}] {len(tris)} triangles")
        panels.append(p)
    return _document(panels, cols * PANEL, rows * (PANEL + CAPTION))


def render_plan(venv, results, tether=None) -> str:
    """One panel per ranked result: path, post-motion tether and length caption."""
    cols, rows = _grid(len(results))
    panels = []
    for k, r in enumerate(results):
        x, y = (k % cols) * PANEL, (k // cols) * (PANEL + CAPTION)
        p = _Panel(venv, x, y)
        _base(p, venv)
        if tether:
            p.polyline(tether, 'stroke="#aaa" stroke-width="1" stroke-dasharray="3,2"')
        p.polyline(r.resulting_tether, 'stroke="black" stroke-width="1.5"')
        p.polyline(r.path, 'stroke="#17c" stroke-width="2"')
        p.dot(r.path[0], 4, 'fill="#e80"')
        p.dot(r.path[-1], 4, 'fill="#2a2"')
        p.text(
            x + MARGIN,
            y + PANEL + 4,
            f"#{k + 1} [{format_signature(r.goal_signature)}] path {r.path_length:.3f} tether {r.resulting_tether_length:.3f}",
        )
        panels.append(p)
    return _document(panels, cols * PANEL, rows * (PANEL + CAPTION))
