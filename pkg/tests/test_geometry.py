from __future__ import annotations

import math

import numpy as np
import pytest

from wslicelab.errors import DomainInvalid, NoSuchCorridor, PointOutsideDomain, SpecInvalid
from wslicelab.geometry import (DecoratedSquareSpec, Polygon, Polyline, allowable_violations,
                                build_domain, connected_by_flood_fill, contains,
                                corridor_midline, distance_to_boundary, domain_dumps, domain_loads,
                                make_domain, segment_blocked)
from wslicelab.geometry.primitives import point_segment_distance


def brute_delta(domain, pt, n=4000):
    """Minimum over densely sampled boundary and slit points."""
    segs = domain.boundary_segments
    t = np.linspace(0.0, 1.0, n)[:, None]
    best = math.inf
    for s in segs:
        pts = s[:2] + t * (s[2:] - s[:2])
        best = min(best, float(np.min(np.hypot(*(pts - np.asarray(pt)).T))))
    return best


# --- primitives ---------------------------------------------------------------

def test_polygon_rejects_self_intersection():
    with pytest.raises(DomainInvalid):
        Polygon([(0, 0), (1, 1), (1, 0), (0, 1)])


def test_polyline_rejects_repeated_vertex():
    with pytest.raises(DomainInvalid):
        Polyline([(0, 0), (0, 0), (1, 0)])


def test_polyline_rejects_nonfinite():
    with pytest.raises((DomainInvalid, ValueError)):
        Polyline([(0, 0), (math.nan, 1)])


# --- contains / delta / blocked ---------------------------------------------------

def test_contains_unit_square(square):
    assert contains(square, (0.5, 0.5))
    assert not contains(square, (1.5, 0.5))


def test_point_on_slit_is_outside(ex32_domain):
    g = ex32_domain.decoration(2)
    (ax, ay), (bx, by) = g["l_slits"][0]
    assert not contains(ex32_domain, ((ax + bx) / 2, (ay + by) / 2))


def test_delta_square_center(square):
    assert distance_to_boundary(square, (0.5, 0.5)) == pytest.approx(0.5, abs=1e-15)


def test_delta_straight_corridor_midline(corridor):
    assert distance_to_boundary(corridor, (2.0, 0.1)) == pytest.approx(0.1, abs=1e-15)


def test_delta_outside_raises(square):
    with pytest.raises(PointOutsideDomain):
        distance_to_boundary(square, (2.0, 0.5))


def test_delta_diagonal_corridor_midline(ex32_domain):
    g = ex32_domain.decoration(3)
    a, R, r = g["a"], g["R"], g["r"]
    # corridor 4 midline at the top of the diagonal (x = xj1 + R/2 on the rising leg)
    x = g["diag"][0] + R / 2
    mid = [p for p in g["midlines"]["4"]]
    xs = np.array([p[0] for p in mid])
    ys = np.array([p[1] for p in mid])
    y = float(np.interp(x, xs, ys))
    got = distance_to_boundary(ex32_domain, (x, y))
    assert got == pytest.approx(r / (2 * math.sqrt(2)), rel=1e-9)
    assert got == pytest.approx(brute_delta(ex32_domain, (x, y), 20000), rel=1e-3)
    assert y > a


def test_segment_blocked_by_slit(ex32_domain):
    g = ex32_domain.decoration(2)
    (ax, ay), (bx, _) = g["l_slits"][0]
    xm = (ax + bx) / 2
    r = g["r"]
    assert segment_blocked(ex32_domain, (xm, ay + r / 2), (xm, ay - r / 2))
    assert not segment_blocked(ex32_domain, (ax + r / 4, ay + r / 2), (bx - r / 4, ay + r / 2))


def test_segment_through_left_gap_unblocked(ex32_domain):
    g = ex32_domain.decoration(2)
    a, r = g["a"], g["r"]
    x_gap = 1.0 + 1.5 * r   # between the U bend at 1 + r and the left end of L_j at 1 + 2r
    assert not segment_blocked(ex32_domain, (x_gap, a + r / 2), (x_gap, a - r / 2))


def test_segment_blocked_outside_raises(square):
    with pytest.raises(PointOutsideDomain):
        segment_blocked(square, (0.5, 0.5), (1.5, 0.5))


# --- builders -----------------------------------------------------------------

def test_ex32_default_parameters(ex32_domain):
    for j in (2, 3, 4):
        g = ex32_domain.decoration(j)
        assert g["a"] == 2.0 ** -j
        assert g["R"] == 4.0 ** (-j - 1)
        assert g["r"] == 8.0 ** (-j - 1)


def test_thm43_quadruple_allowable():
    assert allowable_violations(3, 6, 3.5, 7) == []
    spec = DecoratedSquareSpec.thm43(0.5, 3, 6)
    assert spec.layer_exponents == ((3.5, 7.0),)
    dom = build_domain(spec)
    g = dom.decoration(2)
    assert g["R"] == 2.0 ** -6 and g["r"] == 2.0 ** -12
    assert g["layers"][-1] == [2.0 ** -7, 2.0 ** -14]


def test_ex32_aspect_ratio_too_small():
    with pytest.raises(SpecInvalid):
        build_domain(DecoratedSquareSpec.ex32(2, 2, R_values=[0.01], r_values=[0.005]))


def test_non_allowable_quadruple():
    with pytest.raises(SpecInvalid):
        DecoratedSquareSpec.thm43(0.5, 1.0, 2.0)


def test_underflowing_scale_rejected():
    with pytest.raises(SpecInvalid):
        build_domain(DecoratedSquareSpec.ex32(200, 200))


def test_midlines_inside_and_mirrored(ex32_domain):
    m4 = corridor_midline(ex32_domain, 2, 4)
    m1 = corridor_midline(ex32_domain, 2, 1)
    a = ex32_domain.decoration(2)["a"]
    v4, v1 = m4.array, m1.array
    assert np.all(v4[:, 1] > a)
    assert np.all(ex32_domain.contains_many(v4)) and np.all(ex32_domain.delta_many(v4) > 0)
    assert np.allclose(v1, np.column_stack([v4[:, 0], 2 * a - v4[:, 1]]), atol=1e-12)


def test_missing_corridor(ex32_domain):
    with pytest.raises(NoSuchCorridor):
        corridor_midline(ex32_domain, 9, 4)


@pytest.mark.parametrize("fam", ["ex32", "thm43", "ex44"])
def test_reflection_symmetry(fam):
    spec = {"ex32": DecoratedSquareSpec.ex32(2, 3),
            "thm43": DecoratedSquareSpec.thm43(0.5, 3, 6, 2, 3),
            "ex44": DecoratedSquareSpec.ex44(0.5, 3, 6, 2, 3)}[fam]
    dom = build_domain(spec)
    for g in dom.landmarks["decorations"]:
        a = g["a"]
        lo = {(round(x, 12), round(2 * a - y, 12)) for x, y in g["boundary_lower"]}
        hi = {(round(x, 12), round(y, 12)) for x, y in g["boundary_upper"]}
        assert lo == hi
        u = {(round(x, 12), round(y, 12)) for x, y in g["u_slit"]}
        assert u == {(x, round(2 * a - y, 12)) for x, y in u}


def test_delta_positive_on_quasirandom_points(ex32_domain):
    from scipy.stats import qmc
    pts = qmc.Sobol(2, seed=1).random(2 ** 14)
    x0, y0, x1, y1 = ex32_domain.bounds
    pts = np.column_stack([x0 + pts[:, 0] * (x1 - x0), y0 + pts[:, 1] * (y1 - y0)])
    inside = pts[ex32_domain.contains_many(pts)]
    assert len(inside) >= 10_000
    assert np.all(ex32_domain.delta_many(inside[:10_000]) > 0)


def test_delta_matches_segment_oracle(ex32_domain):
    rng = np.random.default_rng(3)
    g = ex32_domain.decoration(2)
    x0, y0, x1, y1 = g["bbox"]
    pts = np.column_stack([rng.uniform(x0, x1, 4000), rng.uniform(y0, y1, 4000)])
    pts = pts[ex32_domain.contains_many(pts)][:100]
    assert len(pts) == 100
    segs = ex32_domain.boundary_segments
    oracle = np.array([point_segment_distance(p[None], segs).min() for p in pts])
    assert np.allclose(ex32_domain.delta_many(pts), oracle, atol=1e-9, rtol=0)


def test_slit_respect(ex32_domain):
    g = ex32_domain.decoration(3)
    (ax, ay), (bx, _) = g["l_slits"][1]
    xm, r = (ax + bx) / 2, g["r"]
    for dx in np.linspace(-r, r, 7):
        assert segment_blocked(ex32_domain, (xm + dx, ay + r / 3), (xm - dx, ay - r / 3))


def test_corridors_connected_by_flood_fill(ex32_domain):
    g = ex32_domain.decoration(2)
    h = g["r"] / 4
    for c in "1234":
        mid = g["midlines"][c]
        assert connected_by_flood_fill(ex32_domain, h, window=g["bbox"],
                                       probes=[tuple(mid[0]), tuple(mid[-1])])


def test_domain_serialization_fixed_point(thm43_domain):
    text = domain_dumps(thm43_domain)
    again = domain_loads(text)
    assert domain_dumps(again) == text
    assert again.same_as(thm43_domain)


def test_make_domain_slit_outside_rejected():
    with pytest.raises(DomainInvalid):
        make_domain([[(0, 0), (1, 0), (1, 1), (0, 1)]], slits=[[(0.5, 0.5), (1.5, 0.5)]])
