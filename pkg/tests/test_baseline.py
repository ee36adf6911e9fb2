import csv
import io
import math
import random
import time

import pytest
import shapely
from conftest import cover_of, make_env

from tetherplan.baseline import (
    CSV_COLUMNS,
    GridBudgetExceeded,
    build_grid_graph,
    class_agreement,
    compare,
    grid_class_lengths,
    grid_reachable_signatures,
    occupancy,
    sample_free_points,
    write_csv,
)
from tetherplan.errors import PlanningError
from tetherplan.scenarios import generate_environment, single_square
from tetherplan.triangulation import triangulate

SQUARE = [(0, 0), (10, 0), (10, 10), (0, 10)]


@pytest.fixture(scope="module")
def grid12():
    return build_grid_graph(single_square(12.0), 0.5)


def test_obstacle_free_single_layer():
    venv = make_env(SQUARE, anchor=(2, 5), length=100)
    g = build_grid_graph(venv, 0.5)
    assert len(g) == 400 == int(g.free.sum())
    assert {n[2] for n in g.nodes} == {0}


def test_cells_above_block_appear_twice(grid12):
    g = grid12
    # right of the ray: reached over the top (+1) or around the right side
    for x in (5.25, 5.75):
        assert grid_reachable_signatures(g, (x, 8.0)) == {(), (1,)}
    # left of the ray: directly, or under the block and back across the ray
    for x in (2.0, 4.25):
        assert grid_reachable_signatures(g, (x, 8.0)) == {(), (-1,)}


def test_halving_resolution_quadruples_nodes():
    venv = single_square(12.0)
    coarse = len(build_grid_graph(venv, 0.5))
    fine = len(build_grid_graph(venv, 0.25))
    assert 3.5 <= fine / coarse <= 4.5


def test_reachable_signatures_examples(grid12):
    g = build_grid_graph(single_square(7.0), 0.1)
    assert grid_reachable_signatures(g, (2, 5)) == {()}
    # at l = 12 a loop around the block (about 10.47) fits
    assert grid_reachable_signatures(grid12, (2, 5)) == {(), (1,), (-1,)}
    assert grid_reachable_signatures(g, (8, 5)) == {(), (1,)}
    g = build_grid_graph(single_square(3.0), 0.5)
    assert grid_reachable_signatures(g, (8, 5)) == set()
    assert grid_reachable_signatures(g, (20, 5)) == set()


def test_class_lengths_are_taut(grid12):
    T = triangulate(single_square(12.0))
    got = grid_class_lengths(grid12, T, (8, 5))
    assert got[()] == pytest.approx(2 * math.sqrt(5) + 2, abs=1e-9)
    assert got[(1,)] == pytest.approx(2 * math.sqrt(5) + 2, abs=1e-9)


def test_anchor_cell_blocked():
    venv = single_square(12.0)
    with pytest.raises(PlanningError) as info:
        build_grid_graph(make_env(SQUARE, [[(4, 4), (6, 4), (6, 6), (4, 6)]], (3.95, 5), 12), 0.3)
    assert info.value.code == "ANCHOR_CELL_BLOCKED"
    with pytest.raises(ValueError):
        build_grid_graph(venv, 0)


@pytest.mark.parametrize("m,seed", [(1, 0), (3, 1), (6, 2)])
def test_occupancy_is_conservative(m, seed):
    venv = generate_environment(m, seed)
    origin, free = occupancy(venv, 0.5)
    obstacles = shapely.union_all([shapely.Polygon(o.vertices) for o in venv.obstacles])
    for (i, j), ok in zip(((i, j) for i in range(free.shape[0]) for j in range(free.shape[1])), free.ravel()):
        cell = shapely.box(origin[0] + i * 0.5, origin[1] + j * 0.5, origin[0] + (i + 1) * 0.5, origin[1] + (j + 1) * 0.5)
        assert ok == (cell.intersection(obstacles).area == 0 and not cell.relate_pattern(obstacles, "T********"))


@pytest.mark.parametrize("m,seed", [(2, 0), (4, 1)])
def test_nodes_grow_with_length(m, seed):
    venv = generate_environment(m, seed)
    prev = set()
    for l in (4.0, 8.0, 12.0):
        g = build_grid_graph(venv, 0.5, l)
        nodes = {(i, j, g.sigs.word(s)) for i, j, s in g.nodes}
        assert prev <= nodes
        assert all(d <= l for d in g.dist.values())
        prev = nodes


def test_grid_distances_bound_straight_line(grid12):
    g = grid12
    for (i, j, _), d in g.dist.items():
        c = g.center(i, j)
        a = g.center(*g.anchor_node[:2])
        assert d >= math.dist(a, c) - 1e-9


def test_budget_exceeded():
    venv = generate_environment(6, 6).with_length(20.0)
    with pytest.raises(GridBudgetExceeded):
        build_grid_graph(venv, 0.25, deadline=time.perf_counter())
    rep = compare(venv, 20.0, (0.25,), samples=0, budget_s=0.0)
    assert rep.grid == {0.25: None}
    assert rep.row()["grid_nodes_r0.25"] == "skipped"


def test_compare_and_csv():
    venv = single_square(12.0)
    rep = compare(venv, 12.0, name="square", samples=10, seed=3)
    assert rep.cover_triangles > 0
    nodes = {r: e[0] for r, e in rep.grid.items()}
    assert rep.cover_triangles < nodes[0.5] < nodes[0.25]
    assert rep.agreement_pct is not None
    text = write_csv([rep, compare(venv, 8.0, name="square", samples=0)])
    rows = list(csv.DictReader(io.StringIO(text)))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert [r["l"] for r in rows] == ["12", "8"]
    assert rows[1]["agreement_pct"] == ""
    assert int(rows[0]["bar_T2_count"]) == rep.cover_triangles


def test_compare_skip():
    rep = compare(single_square(12.0), 12.0, skip=(0.25,), samples=0)
    assert rep.grid[0.25] is None and rep.grid[0.5][0] > 0


def test_class_agreement_on_small_instance():
    venv = single_square(12.0)
    c, T = cover_of(venv)
    g = build_grid_graph(venv, 0.25)
    pts = sample_free_points(venv, 30, random.Random(8))
    agree, judged, details = class_agreement(c, g, T, pts, guard=2 * math.sqrt(2) * 0.25)
    assert judged == len(details) and judged > 0
    # every class the cover reports is found by the grid as well
    for _, cover, grid, _ in details:
        assert set(cover) <= set(grid)
