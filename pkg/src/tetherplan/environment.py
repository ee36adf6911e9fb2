"""Workspace, obstacles, anchor, tether length and generator rays."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

from .errors import EnvironmentValidationError, ParseError
from .geometry import (
    IntersectionKind,
    Location,
    Point,
    Polygon,
    on_segment,
    point_in_polygon,
    segment_intersection,
)

GENERATOR_ROTATION_STEP_DEG = 5.0
GENERATOR_MAX_TRIES = 72
RAY_CLIP_MARGIN = 1.0


@dataclass(frozen=True)
class Generator:
    """A ray from inside obstacle ``obstacle`` along ``direction``.

    ``far`` is the end of the ray clipped to the workspace bounding box inflated by
    :data:`RAY_CLIP_MARGIN`; every crossing test uses the segment ``origin -> far``.
    """

    obstacle: int
    origin: Point
    direction: Point
    far: Point

    @property
    def segment(self):
        return (self.origin, self.far)


@dataclass(frozen=True)
class Environment:
    workspace: Polygon
    obstacles: tuple = ()
    anchor: Point = Point(0.0, 0.0)
    tether_length: float = 1.0
    # explicit generator specs as (obstacle index, origin, direction); None = compute
    generator_specs: tuple | None = None

    @property
    def n(self) -> int:
        return len(self.obstacles)


@dataclass(frozen=True)
class ValidatedEnvironment:
    env: Environment
    relevant: tuple
    generators: tuple = field(default=())

    @property
    def m(self) -> int:
        return len(self.generators)

    @property
    def workspace(self) -> Polygon:
        return self.env.workspace

    @property
    def obstacles(self) -> tuple:
        return self.env.obstacles

    @property
    def anchor(self) -> Point:
        return self.env.anchor

    @property
    def tether_length(self) -> float:
        return self.env.tether_length

    def with_length(self, length: float) -> "ValidatedEnvironment":
        if not (length > 0 and math.isfinite(length)):
            raise EnvironmentValidationError("NONPOSITIVE_TETHER", f"tether length {length!r}")
        env = Environment(
            self.env.workspace, self.env.obstacles, self.env.anchor, float(length), self.env.generator_specs
        )
        return ValidatedEnvironment(env, self.relevant, self.generators)


def _polygons_meet(a: Polygon, b: Polygon) -> bool:
    for e in a.edges():
        for f in b.edges():
            if segment_intersection(e, f).kind is not IntersectionKind.NONE:
                return True
    return point_in_polygon(a.vertices[0], b) is not Location.OUTSIDE or (
        point_in_polygon(b.vertices[0], a) is not Location.OUTSIDE
    )


def _check_polygon(poly: Polygon, what: str) -> None:
    problem = poly.simplicity_problem()
    if problem:
        raise EnvironmentValidationError("INVALID_POLYGON", f"{what}: {problem}")


def _boundary_contact(obstacle: Polygon, workspace: Polygon) -> tuple[bool, bool]:
    """Return (touches the workspace boundary, shares a boundary piece of positive length)."""
    touches = shares = False
    for e in obstacle.edges():
        for f in workspace.edges():
            kind = segment_intersection(e, f).kind
            if kind is IntersectionKind.OVERLAP:
                return True, True
            if kind is not IntersectionKind.NONE:
                touches = True
    return touches, shares


def classify_homotopy_relevant(env: Environment) -> tuple:
    """Indices of obstacles whose closure stays off the workspace boundary."""
    return tuple(i for i, obs in enumerate(env.obstacles) if not _boundary_contact(obs, env.workspace)[0])


def _interior_point(poly: Polygon) -> Point:
    c = poly.centroid()
    if point_in_polygon(c, poly) is Location.INSIDE:
        return c
    # nonconvex: midpoint of the first vertical chord through the interior,
    # at an abscissa between two distinct vertex abscissae closest to the centroid
    xs = sorted({v[0] for v in poly.vertices})
    mids = sorted(((xs[i] + xs[i + 1]) / 2 for i in range(len(xs) - 1)), key=lambda x: abs(x - c[0]))
    for x in mids:
        ys = []
        for a, b in poly.edges():
            if (a[0] < x) != (b[0] < x):
                t = (x - a[0]) / (b[0] - a[0])
                ys.append(a[1] + t * (b[1] - a[1]))
        ys.sort()
        for i in range(0, len(ys) - 1, 2):
            p = Point(x, (ys[i] + ys[i + 1]) / 2)
            if point_in_polygon(p, poly) is Location.INSIDE:
                return p
    raise EnvironmentValidationError("GENERATOR_CONSTRUCTION_FAILED", "no interior point found")


def clip_ray(origin, direction, workspace: Polygon) -> Point:
    xmin, ymin, xmax, ymax = workspace.bbox()
    xmin -= RAY_CLIP_MARGIN
    ymin -= RAY_CLIP_MARGIN
    xmax += RAY_CLIP_MARGIN
    ymax += RAY_CLIP_MARGIN
    ts = []
    dx, dy = direction
    if dx > 0:
        ts.append((xmax - origin[0]) / dx)
    elif dx < 0:
        ts.append((xmin - origin[0]) / dx)
    if dy > 0:
        ts.append((ymax - origin[1]) / dy)
    elif dy < 0:
        ts.append((ymin - origin[1]) / dy)
    t = min(ts)
    return Point(origin[0] + t * dx, origin[1] + t * dy)


def _ray_problem(gen: Generator, placed, env: Environment) -> str | None:
    seg = gen.segment
    for other in placed:
        if segment_intersection(seg, other.segment).kind is not IntersectionKind.NONE:
            return f"ray of obstacle {gen.obstacle} meets ray of obstacle {other.obstacle}"
    if on_segment(env.anchor, *seg):
        return f"ray of obstacle {gen.obstacle} passes through the anchor"
    for poly in (env.workspace, *env.obstacles):
        for v in poly.vertices:
            if on_segment(v, *seg):
                return f"ray of obstacle {gen.obstacle} passes through vertex {tuple(v)}"
    return None


def _off_rays(origin: Point, obstacle: Polygon, placed) -> Point:
    """Move ``origin`` sideways off any earlier ray it lies on (no rotation of
    the new ray could avoid a ray through its own origin)."""
    hit = next((g for g in placed if on_segment(origin, *g.segment)), None)
    if hit is None:
        return origin
    x0, y0, x1, y1 = obstacle.bbox()
    nx, ny = -hit.direction[1], hit.direction[0]
    for frac in (0.1, 0.05, 0.2, 0.02):
        step = frac * min(x1 - x0, y1 - y0)
        for sgn in (1.0, -1.0):
            cand = Point(origin[0] + sgn * step * nx, origin[1] + sgn * step * ny)
            inside = point_in_polygon(cand, obstacle) is Location.INSIDE
            if inside and not any(on_segment(cand, *g.segment) for g in placed):
                return cand
    raise EnvironmentValidationError("GENERATOR_CONSTRUCTION_FAILED", "interior point lies on an earlier ray")


def compute_generators(env: Environment, relevant) -> tuple:
    """One non-intersecting ray per relevant obstacle, default direction +y.

    A ray that meets an earlier ray (or passes exactly through the anchor or an
    environment vertex) is rotated counterclockwise in fixed steps.
    """
    placed: list[Generator] = []
    for idx in relevant:
        origin = _off_rays(_interior_point(env.obstacles[idx]), env.obstacles[idx], placed)
        for k in range(GENERATOR_MAX_TRIES):
            if k == 0:
                direction = Point(0.0, 1.0)
            else:
                ang = math.radians(90.0 + GENERATOR_ROTATION_STEP_DEG * k)
                direction = Point(math.cos(ang), math.sin(ang))
            gen = Generator(idx, origin, direction, clip_ray(origin, direction, env.workspace))
            if _ray_problem(gen, placed, env) is None:
                placed.append(gen)
                break
        else:
            raise EnvironmentValidationError(
                "GENERATOR_CONSTRUCTION_FAILED", f"obstacle {idx}: no admissible direction"
            )
    return tuple(placed)


def _explicit_generators(env: Environment, relevant) -> tuple:
    specs = env.generator_specs
    if sorted(s[0] for s in specs) != sorted(relevant) or len(specs) != len(relevant):
        raise EnvironmentValidationError(
            "INVALID_GENERATORS", "exactly one generator per homotopy-relevant obstacle is required"
        )
    placed: list[Generator] = []
    for idx, origin, direction in specs:
        norm = math.hypot(*direction)
        if norm == 0:
            raise EnvironmentValidationError("INVALID_GENERATORS", f"obstacle {idx}: zero direction")
        direction = Point(direction[0] / norm, direction[1] / norm)
        origin = Point(*origin)
        if point_in_polygon(origin, env.obstacles[idx]) is not Location.INSIDE:
            raise EnvironmentValidationError("INVALID_GENERATORS", f"obstacle {idx}: origin not inside")
        gen = Generator(idx, origin, direction, clip_ray(origin, direction, env.workspace))
        problem = _ray_problem(gen, placed, env)
        if problem:
            raise EnvironmentValidationError("INVALID_GENERATORS", problem)
        placed.append(gen)
    return tuple(placed)


def validate(env: Environment) -> ValidatedEnvironment:
    if not (env.tether_length > 0 and math.isfinite(env.tether_length)):
        raise EnvironmentValidationError("NONPOSITIVE_TETHER", f"tether length {env.tether_length!r}")
    _check_polygon(env.workspace, "workspace")
    for i, obs in enumerate(env.obstacles):
        _check_polygon(obs, f"obstacle {i}")
    for i, a in enumerate(env.obstacles):
        for j in range(i + 1, len(env.obstacles)):
            if _polygons_meet(a, env.obstacles[j]):
                raise EnvironmentValidationError("OVERLAPPING_OBSTACLES", f"obstacles {i} and {j}")
    ws = env.workspace
    for i, obs in enumerate(env.obstacles):
        outside = any(point_in_polygon(v, ws) is Location.OUTSIDE for v in obs.vertices)
        outside = outside or any(point_in_polygon(v, obs) is Location.INSIDE for v in ws.vertices)
        outside = outside or any(
            segment_intersection(e, f).kind is IntersectionKind.PROPER for e in obs.edges() for f in ws.edges()
        )
        outside = outside or any(
            point_in_polygon(((a[0] + b[0]) / 2, (a[1] + b[1]) / 2), ws) is Location.OUTSIDE
            for a, b in obs.edges()
        )
        if outside:
            raise EnvironmentValidationError("OBSTACLE_OUTSIDE_WORKSPACE", f"obstacle {i}")
        touches, shares = _boundary_contact(obs, ws)
        if touches and not shares:
            raise EnvironmentValidationError(
                "DEGENERATE_CONTACT", f"obstacle {i} touches the workspace boundary only at isolated points"
            )
    loc = point_in_polygon(env.anchor, ws)
    if loc is Location.OUTSIDE:
        raise EnvironmentValidationError("ANCHOR_OUTSIDE_WORKSPACE", f"anchor {tuple(env.anchor)}")
    for i, obs in enumerate(env.obstacles):
        if point_in_polygon(env.anchor, obs) is not Location.OUTSIDE:
            raise EnvironmentValidationError("ANCHOR_IN_OBSTACLE", f"anchor lies in obstacle {i}")
    relevant = classify_homotopy_relevant(env)
    if env.generator_specs is not None:
        generators = _explicit_generators(env, relevant)
    else:
        generators = compute_generators(env, relevant)
    return ValidatedEnvironment(env, relevant, generators)


def _point(value, what: str) -> Point:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ParseError(f"{what}: expected [x, y], got {value!r}")
    try:
        x, y = float(value[0]), float(value[1])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: {exc}") from None
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ParseError(f"{what}: non-finite coordinate")
    return Point(x, y)


def _ring(value, what: str) -> Polygon:
    if not isinstance(value, list) or len(value) < 3:
        raise ParseError(f"{what}: expected a list of at least 3 points")
    return Polygon.ccw(_point(p, f"{what}[{i}]") for i, p in enumerate(value))


def environment_from_dict(doc) -> Environment:
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object")
    for key in ("workspace", "anchor", "tether_length"):
        if key not in doc:
            raise ParseError(f"missing {key!r}")
    obstacles = doc.get("obstacles", [])
    if not isinstance(obstacles, list):
        raise ParseError("'obstacles' must be a list")
    length = doc["tether_length"]
    if isinstance(length, bool) or not isinstance(length, (int, float)):
        raise ParseError("'tether_length' must be a number")
    specs = None
    if "generators" in doc:
        specs = []
        for i, g in enumerate(doc["generators"]):
            try:
                specs.append((int(g["obstacle"]), _point(g["origin"], "origin"), _point(g["direction"], "direction")))
            except (KeyError, TypeError) as exc:
                raise ParseError(f"generators[{i}]: {exc}") from None
        specs = tuple(specs)
    return Environment(
        workspace=_ring(doc["workspace"], "workspace"),
        obstacles=tuple(_ring(o, f"obstacles[{i}]") for i, o in enumerate(obstacles)),
        anchor=_point(doc["anchor"], "anchor"),
        tether_length=float(length),
        generator_specs=specs,
    )


def load_environment(text: str) -> ValidatedEnvironment:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from None
    return validate(environment_from_dict(doc))


def environment_to_dict(env: Environment) -> dict:
    def xy(p):
        return [float(p[0]), float(p[1])]

    doc = {
        "workspace": [xy(v) for v in env.workspace.vertices],
        "obstacles": [[xy(v) for v in o.vertices] for o in env.obstacles],
        "anchor": xy(env.anchor),
        "tether_length": float(env.tether_length),
    }
    if env.generator_specs is not None:
        doc["generators"] = [{"obstacle": i, "origin": xy(o), "direction": xy(d)} for i, o, d in env.generator_specs]
    return doc


def serialize(env: Environment | ValidatedEnvironment) -> str:
    if isinstance(env, ValidatedEnvironment):
        env = env.env
    return json.dumps(environment_to_dict(env), indent=2, sort_keys=True) + "\n"
