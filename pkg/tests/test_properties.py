from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from wslicelab.errors import SpecInvalid
from wslicelab.experiments import classify, ex45_trajectories, recipe_classes
from wslicelab.experiments.scaling import closed_form_ratio, related_exponents, scaling_row
from wslicelab.geometry import DecoratedSquareSpec, Family, RModifier, build_domain, rectangle_domain
from wslicelab.geometry.io import domain_dumps, domain_loads
from wslicelab.metrics import build_grid, d_alpha, min_crossing_length
from wslicelab.metrics.paths import distances_from
from wslicelab.slices import WsliceDataset, make_slice, measure_dataset, rectangle_piece

CASES = settings(max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow])
alphas = st.floats(0.0, 1.0)


@pytest.fixture(scope="module")
def rect_grid():
    dom = rectangle_domain(0, 0, 4, 1)
    return build_grid(dom, dom.bounds, 1 / 16)


# --- metric axioms --------------------------------------------------------------------

@CASES
@given(st.data(), alphas)
def test_symmetry_and_triangle(rect_grid, data, alpha):
    n = len(rect_grid.xy)
    i, j, k = (data.draw(st.integers(0, n - 1)) for _ in range(3))
    x, y, z = (tuple(rect_grid.xy[m]) for m in (i, j, k))
    assert d_alpha(rect_grid, x, y, alpha).value == d_alpha(rect_grid, y, x, alpha).value
    dx, dy = distances_from(rect_grid, x, alpha), distances_from(rect_grid, y, alpha)
    assert dx[k] <= (dx[j] + dy[k]) * (1 + 1e-12)


# --- dataset verdicts -----------------------------------------------------------------

def _dataset(dom, t, xs, ys, cuts, widths, C, alpha):
    slices = [make_slice(dom, [rectangle_piece(t * c, -t, t * (c + w), 2 * t)], label=f"S{i}")
              for i, (c, w) in enumerate(zip(cuts, widths))]
    return WsliceDataset((t * xs[0], t * xs[1]), (t * ys[0], t * ys[1]), C, alpha, tuple(slices))


configs = st.fixed_dictionaries({
    "xs": st.tuples(st.floats(0.2, 0.8), st.floats(0.2, 0.8)),
    "ys": st.tuples(st.floats(3.2, 3.8), st.floats(0.2, 0.8)),
    "n": st.integers(0, 3),
    "w": st.floats(0.05, 0.5),
    "C": st.floats(1.0, 40.0),
    "alpha": st.sampled_from([0.0, 0.25, 0.5, 0.9]),
})


def _measures(cfg, t=1.0):
    dom = rectangle_domain(0, 0, 4 * t, t)
    grid = build_grid(dom, dom.bounds, t / 16)
    n = cfg["n"]
    cuts = [1.0 + i * 2.0 / max(n, 1) for i in range(n)]
    ds = _dataset(dom, t, cfg["xs"], cfg["ys"], cuts, [cfg["w"]] * n, cfg["C"], cfg["alpha"])
    dist = d_alpha(grid, ds.x, ds.y, ds.alpha).value
    return measure_dataset(grid, ds, dist)


@CASES
@given(configs, st.floats(1.0, 40.0), st.floats(1.0, 4.0))
def test_monotone_in_C(cfg, C1, factor):
    m = _measures(cfg)
    if m.passes(C1):
        assert m.passes(C1 * factor)


@CASES
@given(configs, st.sampled_from([0.25, 0.5, 2.0, 4.0]), st.floats(0.1, 10.0))
def test_scaling_invariance(cfg, t, s):
    base, big = _measures(cfg), _measures(cfg, t)
    if cfg["alpha"] == 0:
        assert base.report().verdicts() == big.report().verdicts()
    sigma = lambda m, u: (m.delta_x * u) ** m.ds.alpha + (m.delta_y * u) ** m.ds.alpha + \
        sum((sl.d_S * u) ** m.ds.alpha for sl in m.slices)
    assert big.sigma / base.sigma == pytest.approx(t ** cfg["alpha"], rel=1e-9)
    assert sigma(base, s) / base.sigma == pytest.approx(s ** cfg["alpha"], rel=1e-9)


# --- WS-1 against brute force -----------------------------------------------------------

def _clip_length(a, b, box) -> float:
    """Length of segment ab inside an axis-aligned box (Liang-Barsky)."""
    x0, y0, x1, y1 = box
    d = b - a
    lo, hi = 0.0, 1.0
    for p, q in ((-d[0], a[0] - x0), (d[0], x1 - a[0]), (-d[1], a[1] - y0), (d[1], y1 - a[1])):
        if p == 0:
            if q < 0:
                return 0.0
            continue
        r = q / p
        if p < 0:
            lo = max(lo, r)
        else:
            hi = min(hi, r)
    return max(0.0, hi - lo) * float(np.hypot(*d))


@CASES
@given(st.floats(2.0, 3.0), st.floats(0.0, 1.0), st.floats(0.1, 0.6), st.data())
def test_ws1_brute_force(length, u, w, data):
    x0 = 0.6 + u * (length - 1.6)
    dom = rectangle_domain(0, 0, length, 1)
    grid = build_grid(dom, dom.bounds, 1 / 4)
    n = len(grid.xy)
    assert n <= 200
    box = (x0, -1.0, min(x0 + w, length - 0.3), 2.0)
    s = make_slice(dom, [rectangle_piece(*box)])
    left = [i for i in range(n) if grid.xy[i, 0] < x0 - 1e-9]
    right = [i for i in range(n) if grid.xy[i, 0] > box[2] + 1e-9]
    ix, iy = data.draw(st.sampled_from(left)), data.draw(st.sampled_from(right))
    D = np.full((n, n), np.inf)
    np.fill_diagonal(D, 0.0)
    for a, b in grid.edges:
        D[a, b] = D[b, a] = min(D[a, b], _clip_length(grid.xy[a], grid.xy[b], box))
    for k in range(n):   # Floyd-Warshall
        D = np.minimum(D, D[:, k:k + 1] + D[k:k + 1, :])
    got = min_crossing_length(grid, s, tuple(grid.xy[ix]), tuple(grid.xy[iy]))
    assert got == pytest.approx(D[ix, iy], abs=1e-9)
    for C in (1.0, 2.0, 5.0):
        assert (got >= s.d_S / C - 2 * 0.25) == (D[ix, iy] >= s.d_S / C - 2 * 0.25 - 1e-9) or \
            abs(D[ix, iy] - (s.d_S / C - 0.5)) < 1e-9


# --- serialization, identities, duality ---------------------------------------------------

@CASES
@given(st.floats(0.05, 0.95), st.integers(1, 3), st.integers(0, 1), st.booleans())
def test_serialization_fixed_point(alpha0, jmin, span, fat):
    make = DecoratedSquareSpec.ex44 if fat else DecoratedSquareSpec.thm43
    try:
        spec = make(alpha0, 3.0, 6.0, jmin, jmin + span)
        dom = build_domain(spec)
    except SpecInvalid:
        assume(False)
    text = domain_dumps(dom)
    assert domain_dumps(domain_loads(text)) == text
    assert DecoratedSquareSpec.from_dict(spec.to_dict()).to_dict() == spec.to_dict()


@settings(max_examples=1000, deadline=None)
@given(st.integers(1, 200), alphas, st.floats(0.0, 0.99),
       st.floats(2.0, 6.0), st.floats(4.0, 10.0),
       st.sampled_from([Family.THM43_THINSHORT, Family.THM43_FATLONG, Family.EX45]),
       st.sampled_from(list(RModifier)))
def test_identity_exactness(j, alpha, alpha0, p, q, family, mod):
    if family is not Family.EX45:
        mod = RModifier.NONE
    pp, qp = related_exponents(family, alpha0, p, q)
    row = scaling_row(j, alpha, p, q, pp, qp, mod)
    assert row.log2_ratio_over_j == pytest.approx(closed_form_ratio(family, j, alpha, alpha0, mod),
                                                  abs=1e-12)


@CASES
@given(st.floats(0.05, 0.95), st.floats(0.0, 0.999))
def test_reflection_duality(alpha0, alpha):
    thin = classify(recipe_classes(DecoratedSquareSpec.thm43(alpha0)), alpha)
    fat = classify(recipe_classes(DecoratedSquareSpec.ex44(alpha0)), alpha)
    if alpha == alpha0:
        assert thin == fat
    else:
        assert thin != fat


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.95), st.lists(st.integers(2, 12), min_size=1, max_size=4, unique=True))
def test_reports_deterministic(alpha0, js):
    a, b = ex45_trajectories(alpha0, js=js), ex45_trajectories(alpha0, js=js)
    assert a.to_json() == b.to_json() and a.to_csv() == b.to_csv()
    assert a.stem == b.stem
