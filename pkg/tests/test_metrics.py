from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from wslicelab.errors import Disconnected, EmptyGrid, EndpointInsideSlice, PathExitsDomain, ResolutionTooCoarse, SnapFailed
from wslicelab.geometry import Polyline, make_domain, rectangle_domain
from wslicelab.metrics import (PathKind, build_grid, check_uniform_path, d_alpha, decoration_grid,
                               distances_from, len_alpha_polyline, min_crossing_length)
from wslicelab.slices import make_slice, rectangle_piece


# --- grid construction ------------------------------------------------------------

def test_unit_square_grid_node_count(square):
    grid = build_grid(square, (0, 0, 1, 1), 0.1)
    # lattice points k/10 with delta >= h/2 are k = 1..9 in both directions
    assert grid.n_nodes == 81
    assert np.all(grid.delta >= 0.05 - 1e-15)
    assert grid.n_components == 1


def test_grid_is_deterministic(square):
    a = build_grid(square, (0, 0, 1, 1), 0.05)
    b = build_grid(square, (0, 0, 1, 1), 0.05)
    assert np.array_equal(a.xy, b.xy) and np.array_equal(a.edges, b.edges)


def test_grid_edges_unblocked(ex32_domain):
    grid = decoration_grid(ex32_domain, 2)
    e = grid.edges
    assert not np.any(ex32_domain.blocked_many(grid.xy[e[:, 0]], grid.xy[e[:, 1]]))


def test_sixteen_neighbourhood(square):
    grid = build_grid(square, (0, 0, 1, 1), 0.1)
    steps = {tuple(np.round((grid.xy[b] - grid.xy[a]) / 0.1).astype(int)) for a, b in grid.edges}
    steps |= {(-dx, -dy) for dx, dy in steps}
    king = {(dx, dy) for dx in (-1, 0, 1) for dy in (-1, 0, 1)} - {(0, 0)}
    knight = {(dx, dy) for dx in (-2, -1, 1, 2) for dy in (-2, -1, 1, 2) if abs(dx) != abs(dy)}
    assert steps == king | knight


def test_empty_grid(square):
    with pytest.raises(EmptyGrid):
        build_grid(square, (2, 2, 3, 3), 0.1)


def test_coarse_resolution_rejected(ex32_domain):
    g = ex32_domain.decoration(2)
    with pytest.raises(ResolutionTooCoarse):
        build_grid(ex32_domain, g["bbox"], g["r"] / 2)


def test_nonpositive_spacing(square):
    with pytest.raises(ValueError):
        build_grid(square, (0, 0, 1, 1), 0.0)


# --- quadrature ------------------------------------------------------------------

def test_len_alpha_one_is_arclength(square):
    path = Polyline([(0.1, 0.1), (0.9, 0.2), (0.5, 0.8)])
    assert len_alpha_polyline(square, path, 1.0) == pytest.approx(path.length(), rel=1e-12)


def test_len_alpha_corridor_closed_forms(corridor):
    w, ell = 0.2, 2.0
    path = Polyline([(1.0, 0.1), (1.0 + ell, 0.1)])
    assert len_alpha_polyline(corridor, path, 0.0) == pytest.approx(2 * ell / w, rel=1e-10)
    assert len_alpha_polyline(corridor, path, 0.5, tol=1e-10) == pytest.approx(
        ell * math.sqrt(2 / w), rel=1e-10)


def test_len_alpha_varying_delta(square):
    # along x = 0.5 from y = 0.1 to 0.4, delta = y, so k = ln 4
    path = Polyline([(0.5, 0.1), (0.5, 0.4)])
    assert len_alpha_polyline(square, path, 0.0, tol=1e-10) == pytest.approx(math.log(4), rel=1e-8)


def test_len_alpha_path_outside(square):
    with pytest.raises(PathExitsDomain):
        len_alpha_polyline(square, Polyline([(0.5, 0.5), (1.5, 0.5)]), 0.0)


def test_len_alpha_scale_inequality(square):
    # for a <= b: delta^(a-1) = delta^(b-1) delta^(a-b) and delta^(a-b) >= (sup delta)^(a-b)
    rng = np.random.default_rng(0)
    for _ in range(20):
        path = Polyline(rng.uniform(0.05, 0.95, (2, 2)))
        v = path.array
        sup = float(np.max(square.delta_many(np.linspace(v[0], v[1], 2001))))
        inf = float(np.min(square.delta_many(np.linspace(v[0], v[1], 2001))))
        for a, b in [(0.0, 0.5), (0.25, 1.0), (0.5, 0.75)]:
            la = len_alpha_polyline(square, path, a)
            lb = len_alpha_polyline(square, path, b)
            assert la >= lb * sup ** (a - b) * (1 - 1e-6)
            assert la <= lb * inf ** (a - b) * (1 + 1e-6)


# --- d_alpha ------------------------------------------------------------------------

def test_d_alpha_same_point(square):
    grid = build_grid(square, (0, 0, 1, 1), 0.1)
    est = d_alpha(grid, (0.5, 0.5), (0.5, 0.5), 0.3)
    assert est.value == 0.0 and est.kind is PathKind.GRID_OPTIMUM


def test_d_alpha_euclidean_in_square(square):
    grid = build_grid(square, (0, 0, 1, 1), 1 / 64)
    rng = np.random.default_rng(1)
    for _ in range(10):
        x, y = rng.uniform(0.1, 0.9, 2), rng.uniform(0.1, 0.9, 2)
        x, y = np.round(x * 64) / 64, np.round(y * 64) / 64
        if np.allclose(x, y):
            continue
        est = d_alpha(grid, x, y, 1.0).value
        assert est == pytest.approx(float(np.hypot(*(x - y))), rel=0.03)


def test_d_alpha_half_plane_oracle():
    dom = rectangle_domain(0, 0, 10, 1)
    grid = build_grid(dom, (4, 0, 6, 1), 0.01)
    est = d_alpha(grid, (5, 0.1), (5, 0.5), 0.0).value
    assert est == pytest.approx(math.log(5), rel=0.05)


def test_d_alpha_corridor_midline(corridor):
    grid = build_grid(corridor, corridor.bounds, 0.2 / 16)
    x, y = (1.0, 0.1), (3.0, 0.1)
    assert d_alpha(grid, x, y, 0.0).value == pytest.approx(2 * 2.0 / 0.2, rel=0.02)
    assert d_alpha(grid, x, y, 0.5).value == pytest.approx(2.0 * math.sqrt(2 / 0.2), rel=0.02)


def test_d_alpha_symmetric_and_triangle(ex32_domain):
    grid = decoration_grid(ex32_domain, 2)
    rng = np.random.default_rng(5)
    idx = rng.choice(grid.n_nodes, size=(50, 3), replace=False)
    dist = {}
    for i in np.unique(idx):
        dist[int(i)] = distances_from(grid, grid.xy[i], 0.0)
    for a, b, c in idx:
        a, b, c = int(a), int(b), int(c)
        assert dist[a][b] == pytest.approx(dist[b][a], rel=1e-12)
        assert dist[a][c] <= dist[a][b] + dist[b][c] + 1e-12
        assert d_alpha(grid, grid.xy[a], grid.xy[b], 0.0).value == \
            d_alpha(grid, grid.xy[b], grid.xy[a], 0.0).value


def test_d_alpha_resolution_monotone(corridor):
    w = 0.2
    x, y = (0.5, 0.1), (3.5, 0.15)
    h = w / 8
    coarse = d_alpha(build_grid(corridor, corridor.bounds, h), x, y, 0.0).value
    fine = d_alpha(build_grid(corridor, corridor.bounds, h / 2), x, y, 0.0).value
    assert fine <= coarse * (1 + 5 * h / w)


def test_disconnected_components():
    dom = make_domain([[(0, 0), (1, 0), (1, 1), (0, 1)]], slits=[[(0.5, 0.0), (0.5, 0.98)]])
    grid = build_grid(dom, (0, 0, 1, 1), 0.1)
    with pytest.raises(Disconnected):
        d_alpha(grid, (0.2, 0.5), (0.8, 0.5), 0.0)


def test_snap_failure(square):
    grid = build_grid(square, (0, 0, 0.5, 0.5), 0.1)
    with pytest.raises(SnapFailed):
        d_alpha(grid, (0.2, 0.2), (0.9, 0.9), 0.0)


# --- min crossing -------------------------------------------------------------------

def test_min_crossing_avoidable_region(square):
    grid = build_grid(square, (0, 0, 1, 1), 1 / 32)
    s = make_slice(square, [rectangle_piece(0.45, 0.8, 0.55, 0.9)])
    assert min_crossing_length(grid, s, (0.2, 0.3), (0.8, 0.3)) == 0.0


def test_min_crossing_full_strip(corridor):
    h = 0.2 / 16
    grid = build_grid(corridor, corridor.bounds, h)
    w = 0.3
    s = make_slice(corridor, [rectangle_piece(2.0, -1, 2.0 + w, 1)])
    got = min_crossing_length(grid, s, (1.0, 0.1), (3.0, 0.1))
    assert abs(got - w) <= 2 * h


def test_min_crossing_endpoint_inside(corridor):
    grid = build_grid(corridor, corridor.bounds, 0.2 / 8)
    s = make_slice(corridor, [rectangle_piece(0.5, -1, 1.5, 1)])
    with pytest.raises(EndpointInsideSlice):
        min_crossing_length(grid, s, (1.0, 0.1), (3.0, 0.1))


def _all_simple_paths(adj, s, t, limit=2_000_000):
    stack = [(s, [s])]
    n = 0
    while stack:
        v, path = stack.pop()
        if v == t:
            yield path
            continue
        for w in adj[v]:
            if w not in path:
                n += 1
                if n > limit:
                    raise RuntimeError("enumeration too large")
                stack.append((w, path + [w]))


def test_min_crossing_brute_force_small_grid():
    # 5 x 4 node domain with a window-shaped obstacle: two routes around a hole
    dom = make_domain([[(0, 0), (6, 0), (6, 5), (0, 5)]], holes=[[(2.5, 1.5), (3.5, 1.5), (3.5, 3.5), (2.5, 3.5)]])
    grid = build_grid(dom, dom.bounds, 1.0, check_resolution=False)
    assert grid.n_nodes <= 225
    region = make_slice(dom, [rectangle_piece(2.6, 0, 3.4, 5)])
    x, y = (1.0, 2.0), (5.0, 3.0)
    got = min_crossing_length(grid, region, x, y)
    from wslicelab.metrics.paths import crossing_weights
    wts = crossing_weights(grid, region.pieces)
    adj = {i: [] for i in range(grid.n_nodes)}
    wmap = {}
    for k, (a, b) in enumerate(grid.edges):
        adj[int(a)].append(int(b))
        adj[int(b)].append(int(a))
        wmap[(int(a), int(b))] = wmap[(int(b), int(a))] = wts[k]
    # enumerating all simple paths is huge; restrict to paths through few nodes via DFS depth cap
    ix, iy = grid.snap(x), grid.snap(y)
    best = math.inf
    for path in itertools.islice(_all_simple_paths(adj, ix, iy), 200_000):
        best = min(best, sum(wmap[e] for e in zip(path, path[1:])))
    assert got <= best + 1e-12
    assert got == pytest.approx(0.8, abs=1e-12)


# --- uniform paths ----------------------------------------------------------------------

def test_square_diameter_is_uniform(square):
    rep = check_uniform_path(square, Polyline([(1e-3, 0.5), (1 - 1e-3, 0.5)]), 2.0, 0.0)
    assert rep.all_pass("bounded-turning") and rep.all_pass("cigar")


def test_doubling_back_fails_bounded_turning(square):
    path = Polyline([(0.45, 0.5), (0.9, 0.5), (0.9, 0.6), (0.1, 0.6), (0.1, 0.54), (0.55, 0.52)])
    v = path.array
    assert path.length() >= 10 * float(np.hypot(*(v[-1] - v[0])))
    rep = check_uniform_path(square, path, 2.0, 0.0)
    assert not rep.all_pass("bounded-turning")


def test_degenerate_path_uniform(square):
    from wslicelab.geometry import path_polyline
    rep = check_uniform_path(square, path_polyline([(0.3, 0.3), (0.3, 0.3)]), 1.0, 0.5)
    assert rep.passed
