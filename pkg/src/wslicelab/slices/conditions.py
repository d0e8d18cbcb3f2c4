"""Mechanical checks of WS-1..WS-5, WS-1+ and the slice condition on a grid.

Measurements are taken once; verdicts at any constant C are then derived from
them, which is what makes bisection over C cheap and exactly monotone.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.sparse.csgraph import dijkstra

from ..errors import AlphaNotZero, EndpointInsideSlice, GridDoesNotCoverDataset, PathExitsDomain
from ..geometry.clip import clip_polyline, convex_inradius_at
from ..geometry.primitives import Polyline, point_in_ring
from ..metrics.grid import GridGraph
from ..metrics.paths import (_walk_back, alpha_csr, d_alpha,
                             min_crossing_length)
from ..metrics.quadrature import len_alpha_pieces, len_alpha_polyline
from ..reports import CheckReport
from .regions import SliceRegion, WsliceDataset

GEOM_TOL = 1e-12


def _check_cover(grid: GridGraph, ds: WsliceDataset) -> None:
    for p in (ds.x, ds.y):
        if not grid.covers(p):
            raise GridDoesNotCoverDataset(f"grid has no node near {tuple(p)}")
    wins = grid.windows
    for s in ds.slices:
        bx0, by0, bx1, by1 = (float(v) for v in np.vstack(s.clipped).min(0).tolist()
                              + np.vstack(s.clipped).max(0).tolist())
        inside = any(w[0] <= bx0 + 1e-15 and bx1 <= w[2] + 1e-15 for w in wins) and \
            min(w[1] for w in wins) <= by0 + 1e-15 and by1 <= max(w[3] for w in wins) + 1e-15
        if not inside:
            raise GridDoesNotCoverDataset(f"slice {s.label!r} lies outside the grid windows")


@dataclass
class SliceMeasure:
    label: str
    d_S: float
    crossing: float | None          # None when an endpoint is in the slice closure
    clearance_x: float
    clearance_y: float

    def ws1(self, C: float, h: float) -> bool:
        return self.crossing is not None and self.crossing >= self.d_S / C - 2 * h

    def ws2(self, C: float, dx: float, dy: float) -> bool:
        return (self.clearance_x >= dx / C - GEOM_TOL) and (self.clearance_y >= dy / C - GEOM_TOL)


@dataclass
class DatasetMeasures:
    ds: WsliceDataset
    h: float
    delta_x: float
    delta_y: float
    dalpha: float
    slices: list

    @property
    def sigma(self) -> float:
        a = self.ds.alpha
        return self.delta_x ** a + self.delta_y ** a + sum(m.d_S ** a for m in self.slices)

    def report(self, C: float | None = None) -> CheckReport:
        C = self.ds.C if C is None else C
        a = self.ds.alpha
        rep = CheckReport("wslice dataset", context={"C": C, "alpha": a, "h": self.h,
                                                     "n_slices": len(self.slices)})
        for m in self.slices:
            rep.add("WS-1", m.ws1(C, self.h),
                    {"min_crossing": m.crossing, "threshold": m.d_S / C - 2 * self.h, "d_S": m.d_S},
                    target=m.label)
            rep.add("WS-2", m.ws2(C, self.delta_x, self.delta_y),
                    {"clearance_x": m.clearance_x, "clearance_y": m.clearance_y,
                     "radius_x": self.delta_x / C, "radius_y": self.delta_y / C}, target=m.label)
        sig = self.sigma
        rep.add("WS-3", self.dalpha <= C * sig * (1 + 1e-12),
                {"d_alpha": self.dalpha, "sigma_alpha": sig, "C_sigma": C * sig,
                 "ratio": self.dalpha / sig if sig > 0 else math.inf})
        denom = self.delta_x ** a + self.delta_y ** a + self.dalpha
        rep.add("sigma-upper-sanity", None, {"fitted_C_prime": sig / denom if denom > 0 else math.inf},
                mandatory=False)
        return rep

    def passes(self, C: float) -> bool:
        return self.report(C).passed


def measure_dataset(grid: GridGraph, ds: WsliceDataset, dalpha_estimate: float) -> DatasetMeasures:
    _check_cover(grid, ds)
    dom = grid.domain
    dx = float(dom.raw_distance(np.array([ds.x]))[0])
    dy = float(dom.raw_distance(np.array([ds.y]))[0])
    h = float(max(grid.node_h[grid.snap(ds.x)], grid.node_h[grid.snap(ds.y)]))
    out = []
    for s in ds.slices:
        try:
            c = min_crossing_length(grid, s, ds.x, ds.y)
        except EndpointInsideSlice:
            c = None
        out.append(SliceMeasure(s.label, s.d_S, c, s.distance_to(ds.x), s.distance_to(ds.y)))
    return DatasetMeasures(ds, h, dx, dy, float(dalpha_estimate), out)


def evaluate_dataset(grid: GridGraph, ds: WsliceDataset, dalpha_estimate: float) -> CheckReport:
    return measure_dataset(grid, ds, dalpha_estimate).report(ds.C)


def smallest_passing_C(pred: Callable[[float], bool], lo: float = 1.0, hi: float = 64.0,
                       iters: int = 50) -> float | None:
    """Bisection for the least C in [lo, hi] with pred(C) true (pred monotone)."""
    if pred(lo):
        return lo
    if not pred(hi):
        return None
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# WS-1+ : diameters of in-slice pieces of paths


def _run_diameters(xy: np.ndarray, path_nodes: Sequence[int], inside: np.ndarray) -> float:
    """Largest diameter among maximal in-slice runs of a node path (0 if none)."""
    nodes = np.asarray(path_nodes)
    m = inside[nodes]
    best = 0.0
    i = 0
    n = len(nodes)
    while i < n:
        if not m[i]:
            i += 1
            continue
        k = i
        while k < n and m[k]:
            k += 1
        pts = xy[nodes[i:k]]
        if len(pts) > 1:
            d = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)).max()
            best = max(best, float(d))
        i = k
    return best


def sample_paths(grid: GridGraph, x, y, alpha: float, n: int = 200, seed: int = 0,
                 sigma: float = 0.6) -> list[np.ndarray]:
    """The alpha-geodesic plus n-1 geodesics of randomly perturbed edge weights."""
    ix, iy = grid.snap(x), grid.snap(y)
    rng = np.random.Generator(np.random.PCG64(seed))
    base = grid.alpha_weights(alpha)
    out = []
    for k in range(n):
        w = base if k == 0 else base * np.exp(sigma * rng.standard_normal(len(base)))
        _, pred = dijkstra(grid.csr(w), directed=True, indices=ix, return_predecessors=True)
        out.append(np.array(_walk_back(pred, ix, iy)))
    return out


def ws1plus_exact(grid: GridGraph, s: SliceRegion, x, y, max_inside: int = 40,
                  max_sets: int = 200000) -> float | None:
    """Exact min over grid walks of the largest in-slice run diameter.

    Feasibility at level v: x and y connect once the out-of-slice nodes are
    joined through every connected in-slice node set of diameter <= v.  Sets
    are enumerated with the ESU scheme; returns None when the slice holds too
    many nodes or too many sets for exhaustive treatment.
    """
    ix, iy = grid.snap(x), grid.snap(y)
    inside = s.inside_mask(grid.xy)
    ins = np.flatnonzero(inside)
    if len(ins) > max_inside:
        return None
    if inside[ix] or inside[iy]:
        raise EndpointInsideSlice("endpoint node inside the slice")
    n = grid.n_nodes
    e = grid.edges
    adj: dict[int, set] = {int(i): set() for i in ins}
    out_nb: dict[int, set] = {int(i): set() for i in ins}
    for a, b in e:
        a, b = int(a), int(b)
        if inside[a] and inside[b]:
            adj[a].add(b)
            adj[b].add(a)
        elif inside[a]:
            out_nb[a].add(b)
        elif inside[b]:
            out_nb[b].add(a)
    pts = grid.xy[ins]
    dist = np.sqrt(((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1))
    pos = {int(v): k for k, v in enumerate(ins)}
    levels = np.unique(np.concatenate([[0.0], dist.ravel()]))

    oo = e[~inside[e[:, 0]] & ~inside[e[:, 1]]]

    def feasible(v: float) -> bool | None:
        parent = np.arange(n)

        def find(u):
            while parent[u] != u:
                parent[u] = parent[parent[u]]
                u = parent[u]
            return u

        def union(u, w):
            ru, rw = find(u), find(w)
            if ru != rw:
                parent[ru] = rw

        for a, b in oo:
            union(int(a), int(b))
        count = 0
        for start in adj:
            stack = [(frozenset([start]), frozenset(w for w in adj[start] if w > start))]
            while stack:
                sub, ext = stack.pop()
                count += 1
                if count > max_sets:
                    return None
                nbs = set().union(*(out_nb[u] for u in sub))
                if len(nbs) > 1:
                    it = iter(nbs)
                    f = next(it)
                    for w in it:
                        union(f, w)
                ext_list = sorted(ext)
                nsub_adj = set().union(*(adj[u] for u in sub)) | sub
                while ext_list:
                    w = ext_list.pop()
                    if max(dist[pos[w], pos[u]] for u in sub) > v:
                        continue
                    new_ext = set(ext_list) | {u for u in adj[w] if u > start and u not in nsub_adj}
                    stack.append((sub | {w}, frozenset(new_ext)))
        return find(ix) == find(iy)

    lo, hi = 0, len(levels) - 1
    f_hi = feasible(levels[hi])
    if f_hi is None:
        return None
    if not f_hi:
        return math.inf
    while lo < hi:
        mid = (lo + hi) // 2
        f = feasible(levels[mid])
        if f is None:
            return None
        if f:
            hi = mid
        else:
            lo = mid + 1
    return float(levels[lo])


def ws1plus_walk_oracle(grid: GridGraph, s: SliceRegion, x, y) -> float:
    """Literal exhaustive search over all walks (state = node + current run); tiny grids only."""
    ix, iy = grid.snap(x), grid.snap(y)
    inside = s.inside_mask(grid.xy)
    nbrs: dict[int, list] = {}
    for a, b in grid.edges:
        nbrs.setdefault(int(a), []).append(int(b))
        nbrs.setdefault(int(b), []).append(int(a))

    def diam(run):
        if len(run) < 2:
            return 0.0
        p = grid.xy[list(run)]
        return float(np.sqrt(((p[:, None] - p[None]) ** 2).sum(-1)).max())

    ins = np.flatnonzero(inside)
    p = grid.xy[ins]
    levels = np.unique(np.concatenate([[0.0], np.sqrt(((p[:, None] - p[None]) ** 2).sum(-1)).ravel()])) \
        if len(ins) else np.array([0.0])
    for v in levels:
        seen = {(ix, frozenset())}
        stack = [(ix, frozenset())]
        found = False
        while stack and not found:
            u, run = stack.pop()
            for w in nbrs.get(u, []):
                nrun = (run | {w}) if inside[w] else frozenset()
                if inside[w] and diam(nrun) > v + 1e-15:
                    continue
                st = (w, nrun)
                if w == iy:
                    found = True
                    break
                if st not in seen:
                    seen.add(st)
                    stack.append(st)
        if found:
            return float(v)
    return math.inf


# ---------------------------------------------------------------------------
# WS-4, WS-5, WS-1+


@dataclass
class WsPlusMeasures:
    ds: WsliceDataset
    h: float
    efficiency: dict
    per_slice: list = field(default_factory=list)   # dicts: label, d_S, ws4_len, ws5_radius, ws1p, method

    def report(self, C: float | None = None) -> CheckReport:
        C = self.ds.C if C is None else C
        a = self.ds.alpha
        rep = CheckReport("wslice+ dataset", context={"C": C, "alpha": a, "h": self.h})
        rep.add("efficiency", self.efficiency["ok"], self.efficiency, mandatory=False)
        for m in self.per_slice:
            rep.add("WS-4", m["ws4_len"] <= C * m["d_S"] ** a * (1 + 1e-9),
                    {"len_alpha_inside": m["ws4_len"], "bound": C * m["d_S"] ** a}, target=m["label"])
            rep.add("WS-5", m["ws5_radius"] >= m["d_S"] / C - GEOM_TOL,
                    {"inscribed_radius": m["ws5_radius"], "needed": m["d_S"] / C}, target=m["label"])
            exact = m["method"] == "exact"
            rep.add("WS-1+", m["ws1p"] >= m["d_S"] / C - 2 * self.h,
                    {"min_max_run_diameter": m["ws1p"], "threshold": m["d_S"] / C - 2 * self.h,
                     "method": m["method"]}, target=m["label"], approx=not exact, mandatory=False)
        return rep


def _ws5_radius(grid: GridGraph, s: SliceRegion) -> float:
    best = 0.0
    for v in s.pieces:
        bx0, by0 = v.min(0)
        bx1, by1 = v.max(0)
        cand = np.flatnonzero((grid.xy[:, 0] > bx0) & (grid.xy[:, 0] < bx1)
                              & (grid.xy[:, 1] > by0) & (grid.xy[:, 1] < by1))
        if len(cand) == 0:
            continue
        cand = cand[point_in_ring(grid.xy[cand], v)]
        if len(cand) == 0:
            continue
        rad = np.minimum(grid.delta[cand], convex_inradius_at(grid.xy[cand], v))
        best = max(best, float(rad.max()))
    return best


def measure_wsplus(grid: GridGraph, ds: WsliceDataset, efficient_path: Polyline, C1: float,
                   n_samples: int = 200, seed: int = 0, tol: float = 1e-6,
                   paths: list | None = None, exact_max_inside: int = 40) -> WsPlusMeasures:
    _check_cover(grid, ds)
    dom = grid.domain
    a = ds.alpha
    try:
        la = len_alpha_polyline(dom, efficient_path, a, tol)
    except PathExitsDomain:
        raise
    est = d_alpha(grid, ds.x, ds.y, a).value
    eff = {"len_alpha_path": la, "grid_d_alpha": est, "C1": C1,
           "ok": bool(la <= (1 + C1) * est + 1e-12)}
    h = float(grid.h)
    if paths is None and ds.slices:
        paths = sample_paths(grid, ds.x, ds.y, a, n_samples, seed)
    out = []
    for s in ds.slices:
        pieces = clip_polyline(efficient_path, s.pieces)
        ws4 = len_alpha_pieces(dom, pieces, a, tol) if pieces else 0.0
        ws5 = _ws5_radius(grid, s)
        q = ws1plus_exact(grid, s, ds.x, ds.y, max_inside=exact_max_inside)
        method = "exact"
        if q is None:
            method = "sampled"
            inside = s.inside_mask(grid.xy)
            _, mc_path = min_crossing_length(grid, s, ds.x, ds.y, return_path=True)
            q = min(_run_diameters(grid.xy, p, inside) for p in list(paths) + [np.array(mc_path)])
        out.append({"label": s.label, "d_S": s.d_S, "ws4_len": ws4, "ws5_radius": ws5,
                    "ws1p": q, "method": method})
    return WsPlusMeasures(ds, h, eff, out)


def check_wsplus(grid: GridGraph, ds: WsliceDataset, efficient_path: Polyline, C1: float,
                 **kw) -> CheckReport:
    return measure_wsplus(grid, ds, efficient_path, C1, **kw).report(ds.C)


# ---------------------------------------------------------------------------
# slice condition (a)-(d)


def check_slice_condition(grid: GridGraph, ds: WsliceDataset, path: Polyline, C: float,
                          C1: float | None = None) -> CheckReport:
    if ds.alpha != 0:
        raise AlphaNotZero("the slice condition is an alpha = 0 statement")
    dom = grid.domain
    v = path.array
    if not np.all(dom.contains_many(v)):
        raise PathExitsDomain("a path vertex lies outside the domain")
    dsC = ds.with_C(C)
    k_est = d_alpha(grid, ds.x, ds.y, 0.0).value
    rep = CheckReport("slice condition", context={"C": C})
    part_a = evaluate_dataset(grid, dsC, k_est)
    for e in part_a.entries:
        e.condition = "(a) " + e.condition
    rep.extend(part_a)
    part_b = check_wsplus(grid, dsC, path, C - 1 if C1 is None else C1, n_samples=20)
    for e in part_b.entries:
        if e.condition in ("WS-4", "WS-5"):
            e.condition = "(b) " + e.condition
            rep.entries.append(e)

    # sampling along the path
    seg = np.hypot(*(v[1:] - v[:-1]).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    dmin = min((s.d_S for s in ds.slices), default=None)
    step = min(dmin / 8, cum[-1] / 256) if dmin else cum[-1] / 256
    n = max(2, int(math.ceil(cum[-1] / step)) + 1) if cum[-1] > 0 else 1
    ts = np.unique(np.concatenate([np.linspace(0, cum[-1], n), cum]))
    pts = np.column_stack([np.interp(ts, cum, v[:, 0]), np.interp(ts, cum, v[:, 1])])
    # every stretch of the path inside a slice contributes its own vertices and midpoints
    extra = []
    for s in ds.slices:
        for piece in clip_polyline(path, s.pieces):
            q = np.asarray(piece.array if hasattr(piece, "array") else piece, dtype=float)
            extra.extend([q, 0.5 * (q[1:] + q[:-1])])
    if extra:
        pts = np.unique(np.concatenate([pts, *extra]), axis=0)
    delta = dom.raw_distance(pts)

    worst_c = 1.0
    ok_c = True
    for s in ds.slices:
        m = s.closure_mask(pts)
        if not np.any(m):
            continue
        r = delta[m] / s.d_S
        worst_c = max(worst_c, float(r.max()), float(1 / r.min()))
        ok_c &= bool(np.all((r >= 1 / C - GEOM_TOL) & (r <= C + GEOM_TOL)))
    rep.add("(c) delta/d_i comparability", ok_c, {"worst_factor": worst_c})

    kx = dijkstra(alpha_csr(grid, 0.0), directed=True, indices=grid.snap(ds.x))
    ky = dijkstra(alpha_csr(grid, 0.0), directed=True, indices=grid.snap(ds.y))
    _, idx = grid._tree.query(pts)
    near = np.minimum(kx[idx], ky[idx]) <= C
    covered = near.copy()
    for s in ds.slices:
        covered |= s.closure_mask(pts)
    rep.add("(d) coverage", bool(np.all(covered)),
            {"samples": int(len(pts)), "uncovered": int((~covered).sum()),
             "first_uncovered": pts[~covered][0].tolist() if np.any(~covered) else None})
    return rep
