"""Command line: build, plan, rank, bench, render.

Exit codes: 0 success, 1 input or parse error, 2 planning infeasibility.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import pickle
import sys
import time
from pathlib import Path

from .baseline import compare, error_report, write_csv
from .cover import build_complex, dump_complex
from .environment import load_environment, serialize
from .errors import ParseError, TetherPlanError
from .geometry import Point
from .homotopy import format_signature
from .planner import PlanQuery, SearchMode, plan, plan_report, rank_homotopy_classes
from .render import render_environment, render_layers, render_plan, render_triangulation
from .scenarios import generate_environment
from .triangulation import dual_graph, dump_triangulation, triangulate

INFEASIBLE = {"TETHER_INFEASIBLE", "GOAL_UNREACHABLE", "LIFT_EXCEEDS_TETHER"}
CACHE_VERSION = "1"


def _point(text: str) -> Point:
    try:
        x, y = (float(v) for v in text.split(","))
    except ValueError:
        raise ParseError(f"expected X,Y but got {text!r}") from None
    return Point(x, y)


def _tether(text: str) -> tuple:
    return tuple(_point(part) for part in text.split(";") if part.strip())


def _floats(text: str) -> list:
    try:
        out = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ParseError(f"expected a comma separated list of numbers, got {text!r}") from None
    if not out or any(v <= 0 for v in out):
        raise ParseError(f"values must be positive: {text!r}")
    return out


def _load(args):
    path = Path(args.env)
    if not path.is_file():
        raise ParseError(f"environment file not found: {path}")
    venv = load_environment(path.read_text())
    if getattr(args, "length", None) is not None:
        venv = venv.with_length(args.length)
    return venv


def _env_key(venv) -> str:
    text = CACHE_VERSION + serialize(venv) + repr(venv.tether_length)
    return hashlib.sha256(text.encode()).hexdigest()[:20]


def _complex(venv, out: Path | None):
    """Build the cover, or reuse the copy cached for this exact environment."""
    cache = None
    if out is not None:
        cache = out / ".cache" / f"complex-{_env_key(venv)}.pickle"
        if cache.is_file():
            with cache.open("rb") as fh:
                return pickle.load(fh), 0.0, True
    t0 = time.perf_counter()
    T = triangulate(venv)
    G = dual_graph(T, venv.anchor, venv.generators)
    c = build_complex(T, G, venv.anchor, venv.tether_length, venv.generators)
    elapsed = time.perf_counter() - t0
    if cache is not None:
        cache.parent.mkdir(parents=True, exist_ok=True)
        with cache.open("wb") as fh:
            pickle.dump(c, fh, protocol=pickle.HIGHEST_PROTOCOL)
    return c, elapsed, False


def cmd_build(args) -> int:
    venv = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    c, elapsed, cached = _complex(venv, out)
    (out / "complex.json").write_text(dump_complex(c))
    (out / "triangulation.json").write_text(dump_triangulation(c.triangulation, c.dual))
    stats = {**c.stats(), "wall_time_s": round(elapsed, 6), "cached": cached}
    (out / "stats.json").write_text(json.dumps(stats, indent=1, sort_keys=True) + "\n")
    (out / "layers.svg").write_text(render_layers(venv, c))
    print(
        f"vertices {stats['vertices']} edges {stats['edges']} triangles {stats['triangles']} "
        f"layers {stats['layers']} time {elapsed:.3f}s"
    )
    return 0


def _query(args) -> PlanQuery:
    if args.goal is None or args.tether is None:
        raise ParseError("plan needs --goal and --tether")
    return PlanQuery(_tether(args.tether), _point(args.goal))


def cmd_plan(args) -> int:
    venv = _load(args)
    q = _query(args)
    out = Path(args.out) if args.out else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    c, _, _ = _complex(venv, out)
    results = plan(c, q, SearchMode(args.mode))
    report = plan_report(results)
    sys.stdout.write(report)
    if out is not None:
        (out / "plan.json").write_text(report)
        for k, r in enumerate(results, 1):
            (out / f"plan_{k}.svg").write_text(render_plan(venv, [r], q.tether))
    return 0


def cmd_rank(args) -> int:
    venv = _load(args)
    if args.goal is None:
        raise ParseError("rank needs --goal")
    c, _, _ = _complex(venv, Path(args.out) if args.out else None)
    for sig, length in rank_homotopy_classes(c, _point(args.goal)):
        print(f"[{format_signature(sig)}]\t{length:.9f}")
    return 0


def cmd_bench(args) -> int:
    envs = []
    for path in args.env or []:
        p = Path(path)
        if not p.is_file():
            raise ParseError(f"environment file not found: {p}")
        envs.append((p.stem, load_environment(p.read_text())))
    if args.generate:
        for m in args.generate.split(","):
            m = int(m)
            envs.append((f"gen_m{m}_s{args.seed}", generate_environment(m, args.seed + m)))
    if not envs:
        raise ParseError("bench needs --env or --generate")
    lengths = _floats(args.lengths) if args.lengths else None
    resolutions = _floats(args.resolutions)
    reports = []
    for name, venv in envs:
        slow: dict = {}  # resolution -> time of the previous (shorter) length
        for l in lengths or [venv.tether_length]:
            # grid time grows at least with the reachable area; skip when the last
            # run already suggests the budget will be exceeded
            skip = [r for r, t in slow.items() if t is None or t * 4 > args.budget]
            try:
                rep = compare(
                    venv, l, resolutions, name=name, samples=args.samples, seed=args.seed, budget_s=args.budget, skip=skip
                )
            except TetherPlanError as exc:
                reports.append(error_report(name, venv, l, exc))
                continue
            for r, entry in rep.grid.items():
                slow[r] = None if entry is None else entry[1]
            reports.append(rep)
    text = write_csv(reports)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "bench.csv").write_text(text)
    sys.stdout.write(text)
    for rep in reports:
        entry = rep.grid.get(0.5)
        if entry and rep.cover_triangles:
            print(f"# {rep.env} l={rep.l:g}: grid(0.5)/cover size ratio {entry[0] / rep.cover_triangles:.1f}")
    return 0


def cmd_render(args) -> int:
    venv = _load(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tether = _tether(args.tether) if args.tether else None
    (out / "environment.svg").write_text(render_environment(venv, tether))
    if args.complex or args.goal:
        c, _, _ = _complex(venv, out)
        (out / "triangulation.svg").write_text(render_triangulation(venv, c.triangulation, c.dual))
        (out / "layers.svg").write_text(render_layers(venv, c))
        if args.goal:
            q = _query(args)
            (out / "plan.svg").write_text(render_plan(venv, plan(c, q, SearchMode(args.mode)), q.tether))
    return 0


COMMANDS = {"build": cmd_build, "plan": cmd_plan, "rank": cmd_rank, "bench": cmd_bench, "render": cmd_render}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tetherplan", description="Tethered robot planning on a truncated cover.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, env_required=True):
        p.add_argument("--env", required=env_required, help="environment JSON file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--length", type=float, help="override the tether length")

    p = sub.add_parser("build", help="build the cover complex")
    common(p)
    p.set_defaults(out="out")

    p = sub.add_parser("plan", help="plan from the current tether to a goal")
    common(p)
    p.add_argument("--goal", help="X,Y")
    p.add_argument("--tether", help='current tether "x0,y0;x1,y1;..." starting at the anchor')
    p.add_argument("--mode", choices=[m.value for m in SearchMode], default="dual")

    p = sub.add_parser("rank", help="rank homotopy classes reaching a point")
    common(p)
    p.add_argument("--goal", help="X,Y")

    p = sub.add_parser("bench", help="compare the cover with grid graphs")
    p.add_argument("--env", action="append", help="environment JSON file (repeatable)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--generate", help="comma separated obstacle counts of generated environments")
    p.add_argument("--lengths", help="comma separated tether lengths (default: each file's own)")
    p.add_argument("--resolutions", default="0.5,0.25")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=20, help="query points for class agreement")
    p.add_argument("--budget", type=float, default=120.0, help="seconds allowed per grid build")

    p = sub.add_parser("render", help="draw SVG panels")
    common(p)
    p.set_defaults(out="out")
    p.add_argument("--complex", action="store_true", help="also draw the triangulation and cover layers")
    p.add_argument("--goal", help="X,Y (with --tether: draw plans)")
    p.add_argument("--tether")
    p.add_argument("--mode", choices=[m.value for m in SearchMode], default="dual")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except TetherPlanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if exc.code in INFEASIBLE else 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
