from __future__ import annotations

import math

import numpy as np
import pytest

from wslicelab.errors import (AlphaNotZero, GridDoesNotCoverDataset, NoSuchDecoration,
                              PointsNotInDecoration, TooCloseToBoundary, WrongFamily)
from wslicelab.geometry import DecoratedSquareSpec, Polyline, build_domain, rectangle_domain
from wslicelab.metrics import build_grid, d_alpha, decoration_grid, min_crossing_length, with_endpoints
from wslicelab.slices import (SliceKind, WsliceDataset, admissible_for_pair, check_slice_condition,
                              check_wsplus, dataset_from_dict, dyadic_census, evaluate_dataset,
                              make_corridor_slices, make_slice, measure_dataset, rectangle_piece,
                              slice_failure_witness, ws1plus_exact, ws1plus_walk_oracle)
from wslicelab.slices.conditions import _run_diameters, sample_paths


def on_midline(domain, j, corridor, x):
    m = np.array(domain.decoration(j)["midlines"][str(corridor)])
    return (float(x), float(np.interp(x, m[:, 0], m[:, 1])))


@pytest.fixture(scope="module")
def ex32_grid3(ex32_domain):
    return decoration_grid(ex32_domain, 3)


# --- corridor slices -----------------------------------------------------------------

def test_corridor_slice_counts(ex32_domain):
    g = ex32_domain.decoration(3)
    n = math.floor(g["R"] / g["r"])
    assert n == 16
    counts = {k: len(make_corridor_slices(ex32_domain, 3, k)) for k in SliceKind}
    assert counts == {SliceKind.LEFT: n, SliceKind.UPPER: 2 * n, SliceKind.LOWER: 2 * n,
                      SliceKind.RIGHT: n}
    assert sum(counts.values()) == 96


def test_left_slice_width(ex32_domain):
    g = ex32_domain.decoration(3)
    R, r = g["R"], g["r"]
    for s in make_corridor_slices(ex32_domain, 3, SliceKind.LEFT):
        x0, x1 = s.x_range()
        assert x1 - x0 == pytest.approx((R - 2 * r) / 16, rel=1e-12)
        assert x1 > x0


def test_corridor_slices_disjoint(ex32_domain):
    for kind in SliceKind:
        sl = make_corridor_slices(ex32_domain, 2, kind)
        WsliceDataset((1.0 - 1e-3, 0.25), (1.0 - 1e-3, 0.26), 10, 0.0, sl)   # validates disjointness


def test_slice_diameter_bound(ex32_domain):
    for s in make_corridor_slices(ex32_domain, 2, SliceKind.UPPER)[:6]:
        pts = np.concatenate(s.clipped)
        diam = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(-1)).max()
        assert s.d_S >= diam - 1e-15


def test_missing_decoration(ex32_domain):
    with pytest.raises(NoSuchDecoration):
        make_corridor_slices(ex32_domain, 7, SliceKind.LEFT)


# --- admissible families -----------------------------------------------------------

def test_same_corridor_pair(ex32_domain):
    g = ex32_domain.decoration(3)
    r, R = g["r"], g["R"]
    y = on_midline(ex32_domain, 3, 4, 1 + 2 * r)
    z = on_midline(ex32_domain, 3, 4, 1 + 3 * R)
    assert z[0] >= y[0] + 9 * r
    ds = admissible_for_pair(ex32_domain, 3, y, z)
    kinds = {s.label.split("-")[1] for s in ds.slices}
    assert ds.slices and kinds <= {"LEFT", "UPPER", "RIGHT"}
    for s in ds.slices:
        x0, x1 = s.x_range()
        assert x0 >= y[0] + r - 1e-15 and x1 <= z[0] - r + 1e-15


def test_third_fourth_pair_has_no_diagonal_slices(ex32_domain):
    g = ex32_domain.decoration(3)
    r, R = g["r"], g["R"]
    y = on_midline(ex32_domain, 3, 4, 1 + R / 2)
    z = on_midline(ex32_domain, 3, 3, 1 + R / 2 + 2 * r)
    ds = admissible_for_pair(ex32_domain, 3, y, z)
    assert not any(("UPPER" in s.label) or ("LOWER" in s.label) for s in ds.slices)


def test_equal_points_give_empty_family(ex32_domain):
    p = on_midline(ex32_domain, 2, 4, 1.01)
    assert admissible_for_pair(ex32_domain, 2, p, p).slices == ()


def test_admissible_errors(ex32_domain):
    g = ex32_domain.decoration(2)
    with pytest.raises(PointsNotInDecoration):
        admissible_for_pair(ex32_domain, 2, (0.5, 0.5), on_midline(ex32_domain, 2, 4, 1.01))
    a, r = g["a"], g["r"]
    near = (1.01, a + r + r / 20)   # just above U: in corridor 4, too close to the slit
    with pytest.raises(TooCloseToBoundary):
        admissible_for_pair(ex32_domain, 2, near, on_midline(ex32_domain, 2, 4, 1.012))


# --- evaluate_dataset --------------------------------------------------------------

def test_empty_dataset_same_point(square):
    grid = build_grid(square, (0, 0, 1, 1), 1 / 16)
    ds = WsliceDataset((0.5, 0.5), (0.5, 0.5), 2.0, 0.3, ())
    rep = evaluate_dataset(grid, ds, 0.0)
    assert rep.all_pass("WS-3")
    assert rep.select("WS-3")[0].measured["sigma_alpha"] == pytest.approx(2 * 0.5 ** 0.3)


def test_ws2_fails_when_slice_meets_ball(square):
    grid = build_grid(square, (0, 0, 1, 1), 1 / 32)
    s = make_slice(square, [rectangle_piece(0.4, 0.0, 0.5, 1.0)])
    ds = WsliceDataset((0.3, 0.5), (0.8, 0.5), 2.0, 0.0, (s,))
    rep = evaluate_dataset(grid, ds, d_alpha(grid, ds.x, ds.y, 0.0).value)
    assert not rep.all_pass("WS-2")
    assert not rep.passed


def test_grid_must_cover_dataset(square):
    grid = build_grid(square, (0, 0, 0.5, 1), 1 / 16)
    ds = WsliceDataset((0.2, 0.5), (0.8, 0.5), 2.0, 0.0, ())
    with pytest.raises(GridDoesNotCoverDataset):
        evaluate_dataset(grid, ds, 1.0)


def test_fourth_corridor_pair_passes_at_20(ex32_domain, ex32_grid3):
    g = ex32_domain.decoration(3)
    y = on_midline(ex32_domain, 3, 4, 1 + 2 * g["r"])
    z = on_midline(ex32_domain, 3, 4, 1 + 3 * g["R"])
    ds = admissible_for_pair(ex32_domain, 3, y, z, C=20.0)
    rep = evaluate_dataset(ex32_grid3, ds, d_alpha(ex32_grid3, y, z, 0.0).value)
    assert rep.all_pass("WS-1") and rep.all_pass("WS-2") and rep.all_pass("WS-3")


def test_ws1_resolution_soundness(corridor):
    w, x, y = 0.3, (1.0, 0.1), (3.0, 0.1)
    s = make_slice(corridor, [rectangle_piece(2.0, -1, 2.0 + w, 1)])
    ds = WsliceDataset(x, y, 2.0, 0.0, (s,))
    h = 0.2 / 8
    coarse = measure_dataset(build_grid(corridor, corridor.bounds, h), ds, 1.0)
    fine = measure_dataset(build_grid(corridor, corridor.bounds, h / 2), ds, 1.0)
    assert coarse.report().all_pass("WS-1")
    assert fine.slices[0].crossing >= s.d_S / ds.C - 2 * h - 4 * h


def test_separation_necessity(corridor):
    h = 0.2 / 8
    grid = build_grid(corridor, corridor.bounds, h)
    s = make_slice(corridor, [rectangle_piece(2.0, -1, 2.2, 1)])
    x, y = (1.0, 0.1), (3.0, 0.1)
    assert min_crossing_length(grid, s, x, y) > 0
    from scipy.sparse.csgraph import connected_components
    keep = ~s.inside_mask(grid.xy)
    e = grid.edges[keep[grid.edges[:, 0]] & keep[grid.edges[:, 1]]]
    from scipy.sparse import coo_matrix
    adj = coo_matrix((np.ones(len(e)), (e[:, 0], e[:, 1])), shape=(grid.n_nodes,) * 2)
    _, lab = connected_components(adj, directed=False)
    assert lab[grid.snap(x)] != lab[grid.snap(y)]


# --- wslice+ ----------------------------------------------------------------------

def test_ws5_full_width_strip(corridor):
    grid = build_grid(corridor, corridor.bounds, 0.2 / 16)
    s = make_slice(corridor, [rectangle_piece(2.0, -1, 2.3, 1)])
    x, y = (1.0, 0.1), (3.0, 0.1)
    ds = WsliceDataset(x, y, 4.0, 0.0, (s,))
    est = d_alpha(grid, x, y, 0.0)
    rep = check_wsplus(grid, ds, with_endpoints(grid, est, x, y), 0.25, n_samples=10)
    m = rep.select("WS-5")[0].measured
    assert m["inscribed_radius"] == pytest.approx(0.1, abs=0.2 / 16)
    assert rep.all_pass("WS-5")


def test_ws4_path_missing_slice(square):
    grid = build_grid(square, (0, 0, 1, 1), 1 / 32)
    s = make_slice(square, [rectangle_piece(0.4, 0.8, 0.6, 0.95)])
    x, y = (0.2, 0.3), (0.8, 0.3)
    ds = WsliceDataset(x, y, 2.0, 0.5, (s,))
    rep = check_wsplus(grid, ds, Polyline([x, y]), 0.5, n_samples=5, exact_max_inside=0)
    e = rep.select("WS-4")[0]
    assert e.passed and e.measured["len_alpha_inside"] == 0.0


def test_ws1plus_exact_matches_brute_force_and_heuristic():
    dom = rectangle_domain(0, 0, 13, 3)
    grid = build_grid(dom, dom.bounds, 1.0, check_resolution=False)
    # four node columns: no move hops over, so a crossing run holds two nodes at least
    # (enter at x = 6 from 4, step to 7, leave for 9: diameter 1)
    s = make_slice(dom, [rectangle_piece(4.5, -1, 8.5, 4)])
    x, y = (1.0, 1.0), (12.0, 2.0)
    exact = ws1plus_exact(grid, s, x, y)
    assert exact == ws1plus_walk_oracle(grid, s, x, y)
    assert exact == pytest.approx(1.0)
    inside = s.inside_mask(grid.xy)
    heur = min(_run_diameters(grid.xy, p, inside) for p in sample_paths(grid, x, y, 0.0, 50))
    assert heur >= exact
    for C in (1.2, 3.0):
        thr = s.d_S / C - 2 * grid.h
        assert (exact >= thr) == (heur >= thr)


# --- slice condition ------------------------------------------------------------------

def test_slice_condition_square_center(square):
    grid = build_grid(square, (0, 0, 1, 1), 1 / 32)
    x, y = (0.4, 0.5), (0.6, 0.5)
    ds = WsliceDataset(x, y, 2.0, 0.0, ())
    rep = check_slice_condition(grid, ds, Polyline([x, y]), 2.0)
    assert d_alpha(grid, x, y, 0.0).value <= 2.0
    assert rep.passed


def test_slice_condition_coverage_gap(ex32_domain):
    grid = decoration_grid(ex32_domain, 2)
    g = ex32_domain.decoration(2)
    y = on_midline(ex32_domain, 2, 4, 1 + 2 * g["r"])
    z = on_midline(ex32_domain, 2, 4, g["x_end"] - 2 * g["r"])
    lower = make_corridor_slices(ex32_domain, 2, SliceKind.LOWER)
    ds = WsliceDataset(y, z, 2.0, 0.0, tuple(lower))
    est = d_alpha(grid, y, z, 0.0)
    rep = check_slice_condition(grid, ds, with_endpoints(grid, est, y, z), 2.0)
    assert not rep.all_pass("(d) coverage")


def test_slice_condition_comparability_fails(square):
    grid = build_grid(square, (0, 0, 1, 1), 1 / 32)
    s = make_slice(square, [rectangle_piece(0.45, 0.0, 0.55, 1.0)], d_S=5.0)
    x, y = (0.2, 0.5), (0.8, 0.5)
    ds = WsliceDataset(x, y, 2.0, 0.0, (s,))
    rep = check_slice_condition(grid, ds, Polyline([x, y]), 2.0)
    assert not rep.all_pass("(c) delta/d_i comparability")


def test_slice_condition_needs_alpha_zero(square):
    grid = build_grid(square, (0, 0, 1, 1), 1 / 16)
    ds = WsliceDataset((0.4, 0.5), (0.6, 0.5), 2.0, 0.5, ())
    with pytest.raises(AlphaNotZero):
        check_slice_condition(grid, ds, Polyline([(0.4, 0.5), (0.6, 0.5)]), 2.0)


# --- witness ------------------------------------------------------------------------

def test_witness_verdicts():
    dom = build_domain(DecoratedSquareSpec.ex32(1, 5))
    far = slice_failure_witness(dom, 5, 10.0, grid_policy="none")
    assert far.context["impossible"]
    near = slice_failure_witness(dom, 1, 10.0, grid_policy="none")
    assert not near.context["impossible"] and near.context["verdict"] == "inconclusive at this j"
    for j in (1, 5):
        rep = slice_failure_witness(dom, j, 10.0, grid_policy="none")
        m = rep.select("delta(u)")[0].measured
        assert m["delta_u"] == pytest.approx(m["r"] / (2 * math.sqrt(2)), abs=1e-9 * m["r"])
        assert rep.all_pass("avoiding-route-distance")


def test_witness_wrong_family(thm43_domain):
    with pytest.raises(WrongFamily):
        slice_failure_witness(thm43_domain, 2, 10.0)


# --- census ---------------------------------------------------------------------------

def test_census_equal_diameters(square):
    sl = tuple(make_slice(square, [rectangle_piece(0.1 * i + 0.02, 0.4, 0.1 * i + 0.08, 0.46)])
               for i in range(5))
    ds = WsliceDataset((0.5, 0.1), (0.5, 0.9), 2.0, 0.5, sl)
    rows = dyadic_census(ds, sl[0].d_S)
    assert [(r.i, r.m_i) for r in rows] == [(0, 5)]
    assert rows[0].sum_contribution == pytest.approx(5 * sl[0].d_S ** 0.5)


def test_census_empty():
    assert dyadic_census(WsliceDataset((0, 0), (1, 1), 2.0, 0.0, ()), 1.0) == []


def test_census_thm43_right_slices(thm43_domain):
    g = thm43_domain.decoration(3)
    rp = g["layers"][-1][1]
    right = make_corridor_slices(thm43_domain, 3, SliceKind.RIGHT)
    ds = WsliceDataset((0.5, 0.5), (0.5, 0.6), 10.0, 0.5, tuple(right))
    rows = dyadic_census(ds, rp)
    assert sum(r.m_i for r in rows) == len(right)
    assert len(rows) == 1


# --- files ----------------------------------------------------------------------------

def test_dataset_file_round_trip(ex32_domain, tmp_path):
    from wslicelab.slices import load_dataset, save_dataset
    g = ex32_domain.decoration(2)
    y = on_midline(ex32_domain, 2, 4, 1 + 2 * g["r"])
    z = on_midline(ex32_domain, 2, 4, 1 + 3 * g["R"])
    ds = admissible_for_pair(ex32_domain, 2, y, z)
    p = save_dataset(ds, tmp_path / "ds.json")
    again = load_dataset(ex32_domain, p)
    assert again.to_dict() == ds.to_dict()
    assert dataset_from_dict(ex32_domain, again.to_dict()).to_dict() == ds.to_dict()
