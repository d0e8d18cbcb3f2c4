"""Grid shortest paths: d_alpha estimates, minimal in-region crossing, uniformity checks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.sparse.csgraph import dijkstra

from ..errors import Disconnected, EndpointInsideSlice, PathExitsDomain
from ..geometry.clip import inside_fraction
from ..geometry.domain import PlanarDomain
from ..geometry.primitives import Polyline, as_point, path_polyline
from ..reports import CheckReport
from .grid import GridGraph
from .quadrature import len_alpha_polyline


class PathKind(str, Enum):
    UPPER_BOUND = "UPPER_BOUND"
    GRID_OPTIMUM = "GRID_OPTIMUM"


@dataclass(frozen=True)
class MetricParams:
    alpha: float

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")


@dataclass(frozen=True)
class PathEstimate:
    polyline: Polyline
    value: float
    alpha: float
    kind: PathKind
    nodes: tuple = ()

    def to_dict(self) -> dict:
        return {"value": self.value, "alpha": self.alpha, "kind": self.kind.value,
                "polyline": [list(p) for p in self.polyline.vertices]}


def _walk_back(pred: np.ndarray, src: int, dst: int) -> list[int]:
    out = [dst]
    while out[-1] != src:
        p = int(pred[out[-1]])
        if p < 0:
            raise Disconnected("no grid path")
        out.append(p)
    return out[::-1]


def alpha_csr(grid: GridGraph, alpha: float):
    cache = grid.__dict__.setdefault("_alpha_csr", {})
    key = float(alpha)
    if key not in cache:
        if len(cache) >= 2:
            cache.pop(next(iter(cache)))
        cache[key] = grid.csr(grid.alpha_weights(alpha))
    return cache[key]


def distances_from(grid: GridGraph, pt, alpha: float) -> np.ndarray:
    """Grid d_alpha from the node snapped to pt to every node (inf if unreachable)."""
    s = grid.snap(pt)
    return dijkstra(alpha_csr(grid, alpha), directed=True, indices=s)


def _snap_pair(grid: GridGraph, x, y) -> tuple[int, int]:
    ix, iy = grid.snap(x), grid.snap(y)
    if grid.component[ix] != grid.component[iy]:
        raise Disconnected("endpoints snap to different grid components")
    return ix, iy


def node_path_estimate(grid: GridGraph, ix: int, iy: int, alpha: float) -> PathEstimate:
    if ix == iy:
        p = tuple(grid.xy[ix])
        return PathEstimate(path_polyline([p, p]), 0.0, alpha, PathKind.GRID_OPTIMUM, (ix,))
    src, dst = min(ix, iy), max(ix, iy)      # canonical direction: exact symmetry
    dist, pred = dijkstra(alpha_csr(grid, alpha), directed=True, indices=src,
                          return_predecessors=True)
    if not np.isfinite(dist[dst]):
        raise Disconnected("no grid path")
    nodes = _walk_back(pred, src, dst)
    if src != ix:
        nodes = nodes[::-1]
    pl = path_polyline([tuple(grid.xy[i]) for i in nodes])
    return PathEstimate(pl, float(dist[dst]), alpha, PathKind.GRID_OPTIMUM, tuple(nodes))


def d_alpha(grid: GridGraph, x, y, alpha: float) -> PathEstimate:
    MetricParams(alpha)
    x, y = as_point(x), as_point(y)
    if x == y:
        return PathEstimate(path_polyline([x, y]), 0.0, alpha, PathKind.GRID_OPTIMUM)
    ix, iy = _snap_pair(grid, x, y)
    return node_path_estimate(grid, ix, iy, alpha)


def with_endpoints(grid: GridGraph, est: PathEstimate, x, y) -> Polyline:
    """Grid path extended by straight pieces to the true endpoints when unblocked."""
    pts = [tuple(p) for p in est.polyline.vertices]
    dom = grid.domain
    x, y = as_point(x), as_point(y)
    if pts and tuple(x) != pts[0] and not dom.blocked_many(np.array([x]), np.array([pts[0]]))[0]:
        pts.insert(0, tuple(x))
    if pts and tuple(y) != pts[-1] and not dom.blocked_many(np.array([pts[-1]]), np.array([y]))[0]:
        pts.append(tuple(y))
    return path_polyline(pts)


def crossing_weights(grid: GridGraph, pieces) -> np.ndarray:
    """Euclidean length of each edge inside the union of region pieces."""
    w = np.zeros(grid.n_edges)
    if not pieces:
        return w
    allv = np.vstack(pieces)
    bx0, by0 = allv.min(axis=0)
    bx1, by1 = allv.max(axis=0)
    a = grid.xy[grid.edges[:, 0]]
    b = grid.xy[grid.edges[:, 1]]
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    cand = np.flatnonzero((hi[:, 0] >= bx0) & (lo[:, 0] <= bx1) & (hi[:, 1] >= by0) & (lo[:, 1] <= by1))
    if len(cand):
        w[cand] = grid.elen[cand] * inside_fraction(a[cand], b[cand], pieces)
    return w


def min_crossing_length(grid: GridGraph, region, x, y, return_path: bool = False):
    """Least total Euclidean length inside `region` over grid paths from x to y.

    `region` is anything with `pieces` (convex CCW vertex arrays) and
    `closure_contains(pt)`; a SliceRegion qualifies.
    """
    for p in (x, y):
        if region.closure_contains(p):
            raise EndpointInsideSlice(f"{tuple(as_point(p))} lies in the slice closure")
    ix, iy = _snap_pair(grid, x, y)
    if ix == iy:
        return (0.0, [ix]) if return_path else 0.0
    w = crossing_weights(grid, region.pieces)
    src, dst = min(ix, iy), max(ix, iy)
    dist, pred = dijkstra(grid.csr(w), directed=True, indices=src, return_predecessors=True)
    val = float(dist[dst])
    if return_path:
        return val, _walk_back(pred, src, dst)
    return val


# ---------------------------------------------------------------------------
# uniform paths


def _resample(path: Polyline, step: float) -> tuple[np.ndarray, np.ndarray]:
    v = path.array
    seg = np.hypot(*(v[1:] - v[:-1]).T)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    n = max(1, int(math.ceil(total / step))) if total > 0 else 0
    ts = np.unique(np.concatenate([np.linspace(0, total, n + 1), cum]))
    xs = np.interp(ts, cum, v[:, 0])
    ys = np.interp(ts, cum, v[:, 1])
    return ts, np.column_stack([xs, ys])


def check_uniform_path(domain: PlanarDomain, path: Polyline, C: float, alpha: float,
                       tol: float = 1e-8) -> CheckReport:
    if C < 1:
        raise ValueError("C must be >= 1")
    rep = CheckReport("uniform path", context={"C": C, "alpha": alpha})
    v = path.array
    x, y = v[0], v[-1]
    dxy = float(np.hypot(*(y - x)))
    length = path.length()
    if length == 0:
        rep.add("bounded-turning", True, {"length": 0.0, "chord": 0.0})
        rep.add("cigar", True, {"worst_ratio": 0.0})
        rep.add("length-bound-ratio", None, {"ratio": 0.0}, mandatory=False)
        return rep
    if not np.all(domain.contains_many(v)):
        raise PathExitsDomain("a path vertex lies outside the domain")
    nz = np.any(v[1:] != v[:-1], axis=1)
    if np.any(domain.blocked_many(v[:-1][nz], v[1:][nz])):
        raise PathExitsDomain("a path segment crosses the boundary")
    rep.add("bounded-turning", length <= C * dxy * (1 + 1e-12),
            {"length": length, "chord": dxy, "ratio": length / dxy if dxy > 0 else math.inf})

    # cigar: refine until the step is at most a quarter of the sampled minimum delta
    step = length / 64
    while True:
        ts, pts = _resample(path, step)
        d = domain.raw_distance(pts)
        if step <= d.min() / 4 or step < length * 1e-7:
            break
        step = d.min() / 4
    reach = np.minimum(ts, length - ts)
    ratio = reach / (C * d)
    rep.add("cigar", bool(np.all(reach <= C * d * (1 + 1e-12))),
            {"worst_ratio": float(ratio.max()), "samples": int(len(ts)), "step": step})

    la = len_alpha_polyline(domain, path, alpha, tol) if alpha < 1 else length
    dx, dy = float(domain.raw_distance(x[None])[0]), float(domain.raw_distance(y[None])[0])
    if alpha == 0:
        bound = 4 * C * C * math.log(1 + dxy / min(dx, dy))
        r = la / bound if bound > 0 else math.inf
        rep.add("length-bound-ratio", None, {"len_alpha": la, "bound": bound, "ratio": r}, mandatory=False)
    else:
        scale = max(dx, dy, dxy) ** alpha
        rep.add("length-bound-ratio", None, {"len_alpha": la, "scale": scale, "fitted_C_prime": la / scale},
                mandatory=False)
    return rep
