"""Visibility-respecting lattice graphs over windows of a domain.

Nodes sit on the lattice (i*h, k*h) anchored at the origin, so lattices whose
spacings differ by a power of two nest exactly; this is what lets several
patches of different spacing be merged into one graph by identifying
coinciding nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import EmptyGrid, ResolutionTooCoarse, SnapFailed
from ..geometry.domain import PlanarDomain
from ..geometry.primitives import as_point, point_in_ring, point_segment_distance, segments_intersect

# forward half of the 16-neighbourhood (king + knight moves)
STEPS = np.array([(1, 0), (0, 1), (1, 1), (1, -1), (2, 1), (1, 2), (2, -1), (1, -2)], dtype=np.int64)

Window = tuple  # (x0, y0, x1, y1)


def dyadic_spacing(width: float, divisor: float = 8.0) -> float:
    """Largest power of two not exceeding width/divisor."""
    return 2.0 ** math.floor(math.log2(width / divisor))


@dataclass(frozen=True)
class Patch:
    windows: tuple
    h: float


@dataclass(frozen=True, eq=False)
class GridGraph:
    domain: PlanarDomain
    patches: tuple
    xy: np.ndarray          # (N, 2)
    delta: np.ndarray       # (N,)
    node_h: np.ndarray      # (N,) spacing of the finest patch owning the node
    edges: np.ndarray       # (E, 2) with edges[:,0] < edges[:,1]
    elen: np.ndarray        # (E,)
    _perm: np.ndarray = field(repr=False)      # CSR data slot -> edge id
    _indptr: np.ndarray = field(repr=False)
    _indices: np.ndarray = field(repr=False)

    @property
    def h(self) -> float:
        return float(min(p.h for p in self.patches))

    @property
    def n_nodes(self) -> int:
        return len(self.xy)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def windows(self) -> list:
        return [w for p in self.patches for w in p.windows]

    def csr(self, edge_weights: np.ndarray) -> csr_matrix:
        n = self.n_nodes
        return csr_matrix((edge_weights[self._perm], self._indices, self._indptr), shape=(n, n))

    @cached_property
    def _components(self) -> tuple[int, np.ndarray]:
        n, lab = connected_components(self.csr(np.ones(self.n_edges)), directed=False)
        return int(n), lab

    @property
    def n_components(self) -> int:
        return self._components[0]

    @property
    def component(self) -> np.ndarray:
        return self._components[1]

    @cached_property
    def _tree(self):
        from scipy.spatial import cKDTree
        return cKDTree(self.xy)

    def snap(self, pt, radius_factor: float = 2.0) -> int:
        """Nearest node within radius_factor * local h; ties go to the smaller (x, y)."""
        p = np.array(as_point(pt), dtype=float)
        k = min(8, self.n_nodes)
        d, idx = self._tree.query(p, k=k)
        d, idx = np.atleast_1d(d), np.atleast_1d(idx)
        ok = idx < self.n_nodes
        d, idx = d[ok], idx[ok]
        if len(d) == 0:
            raise SnapFailed(f"no node near {tuple(p)}")
        best = d.min()
        tie = idx[d <= best * (1 + 1e-12) + 1e-300]
        cand = sorted(tie.tolist(), key=lambda i: (self.xy[i, 0], self.xy[i, 1]))
        i = cand[0]
        if best > radius_factor * self.node_h[i] * (1 + 1e-12):
            raise SnapFailed(f"no node within {radius_factor}h of ({float(p[0]):g}, {float(p[1]):g})")
        return int(i)

    def covers(self, pt) -> bool:
        try:
            self.snap(pt)
            return True
        except SnapFailed:
            return False

    def alpha_weights(self, alpha: float) -> np.ndarray:
        """Trapezoid len_alpha of each straight edge."""
        da = self.delta[self.edges[:, 0]]
        db = self.delta[self.edges[:, 1]]
        e = alpha - 1.0
        return self.elen * 0.5 * (da ** e + db ** e)

    def summary(self) -> dict:
        return {"nodes": self.n_nodes, "edges": self.n_edges, "components": self.n_components,
                "patches": [{"h": p.h, "windows": [list(w) for w in p.windows]} for p in self.patches]}


# ---------------------------------------------------------------------------
# construction


def _column_intervals(xcol: float, rings: list[np.ndarray]) -> list[tuple[float, float]]:
    """y-intervals of the vertical line x = xcol inside the even-odd union of rings."""
    ys = []
    for r in rings:
        x0, y0 = r[:, 0], r[:, 1]
        x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
        m = (x0 > xcol) != (x1 > xcol)
        if np.any(m):
            yy = y0[m] + (xcol - x0[m]) * (y1[m] - y0[m]) / (x1[m] - x0[m])
            ys.extend(yy.tolist())
    ys.sort()
    return [(ys[i], ys[i + 1]) for i in range(0, len(ys) - 1, 2)]


def _lattice_candidates(domain: PlanarDomain, win, h: float) -> np.ndarray:
    """Integer lattice coordinates (ix, iy) inside the outer region and the window."""
    x0, y0, x1, y1 = win
    outers, inners = domain._rings
    rings = outers + inners
    out = []
    for ix in range(math.ceil(x0 / h), math.floor(x1 / h) + 1):
        xc = ix * h
        for lo, hi in _column_intervals(xc, rings):
            lo, hi = max(lo, y0), min(hi, y1)
            a, b = math.ceil(lo / h), math.floor(hi / h)
            if b >= a:
                iy = np.arange(a, b + 1, dtype=np.int64)
                out.append(np.column_stack([np.full(len(iy), ix, dtype=np.int64), iy]))
    if not out:
        return np.zeros((0, 2), dtype=np.int64)
    return np.vstack(out)


def _segments_near(segs: np.ndarray, win, margin: float) -> np.ndarray:
    x0, y0, x1, y1 = win
    sx0 = np.minimum(segs[:, 0], segs[:, 2])
    sx1 = np.maximum(segs[:, 0], segs[:, 2])
    sy0 = np.minimum(segs[:, 1], segs[:, 3])
    sy1 = np.maximum(segs[:, 1], segs[:, 3])
    m = (sx1 >= x0 - margin) & (sx0 <= x1 + margin) & (sy1 >= y0 - margin) & (sy0 <= y1 + margin)
    return segs[m]


def _exact_delta(domain: PlanarDomain, pts: np.ndarray, win) -> np.ndarray:
    """Exact boundary distance, first against nearby segments, then all as needed."""
    segs = domain.boundary_segments
    margin = 0.5 * max(win[2] - win[0], win[3] - win[1])
    local = _segments_near(segs, win, margin)
    d = point_segment_distance(pts, local) if len(local) else np.full(len(pts), np.inf)
    redo = d > margin
    if np.any(redo):
        d[redo] = point_segment_distance(pts[redo], segs)
    return d


def _patch_nodes(domain: PlanarDomain, patch: Patch) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integer coordinates, positions and deltas of the nodes of one patch."""
    h = patch.h
    cands = [_lattice_candidates(domain, w, h) for w in patch.windows]
    ij = np.unique(np.vstack(cands), axis=0) if cands else np.zeros((0, 2), np.int64)
    if len(ij) == 0:
        return ij, np.zeros((0, 2)), np.zeros(0)
    xy = ij.astype(float) * h
    keep = np.ones(len(xy), dtype=bool)
    for hole in domain.holes:
        keep &= ~point_in_ring(xy, hole.array)
    ij, xy = ij[keep], xy[keep]
    hull = (min(w[0] for w in patch.windows), min(w[1] for w in patch.windows),
            max(w[2] for w in patch.windows), max(w[3] for w in patch.windows))
    d = _exact_delta(domain, xy, hull)
    keep = d >= h / 2
    return ij[keep], xy[keep], d[keep]


def _patch_edges(ij: np.ndarray) -> np.ndarray:
    """Candidate 16-neighbourhood edges between lattice nodes of one patch."""
    if len(ij) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    off = ij.min(axis=0) - 3
    span = int((ij[:, 1] - off[1]).max()) + 4
    key = (ij[:, 0] - off[0]) * span + (ij[:, 1] - off[1])
    order = np.argsort(key)
    skey = key[order]
    out = []
    for dx, dy in STEPS:
        tk = key + dx * span + dy
        pos = np.searchsorted(skey, tk)
        pos = np.minimum(pos, len(skey) - 1)
        hit = skey[pos] == tk
        src = np.flatnonzero(hit)
        out.append(np.column_stack([src, order[pos[hit]]]))
    return np.vstack(out)


def _filter_blocked(domain: PlanarDomain, xy: np.ndarray, delta: np.ndarray,
                    edges: np.ndarray, reach: float, win) -> np.ndarray:
    """Drop edges crossing the boundary; only near-boundary nodes are tested."""
    if len(edges) == 0:
        return edges
    a, b = edges[:, 0], edges[:, 1]
    elen = np.hypot(*(xy[b] - xy[a]).T)
    free = (delta[a] > elen) | (delta[b] > elen)
    test = np.flatnonzero(~free)
    if len(test) == 0:
        return edges
    segs = _segments_near(domain.boundary_segments, win, reach * 2)
    if len(segs) == 0:
        return edges
    src = a[test]
    near_nodes = np.unique(src)
    # (node, segment) pairs within reach of the node
    pn, ps = [], []
    step = max(1, (1 << 21) // len(segs))
    ax, ay = segs[:, 0], segs[:, 1]
    ux, uy = segs[:, 2] - ax, segs[:, 3] - ay
    uu = np.where(ux * ux + uy * uy > 0, ux * ux + uy * uy, 1.0)
    for i in range(0, len(near_nodes), step):
        nodes = near_nodes[i:i + step]
        px, py = xy[nodes, 0:1], xy[nodes, 1:2]
        wx, wy = px - ax, py - ay
        t = np.clip((wx * ux + wy * uy) / uu, 0, 1)
        dd = np.hypot(wx - t * ux, wy - t * uy)
        r_, c_ = np.nonzero(dd <= reach * (1 + 1e-9))
        pn.append(nodes[r_])
        ps.append(c_)
    pn = np.concatenate(pn)
    ps = np.concatenate(ps)
    order = np.argsort(pn, kind="stable")
    pn, ps = pn[order], ps[order]
    lo = np.searchsorted(pn, src, side="left")
    hi = np.searchsorted(pn, src, side="right")
    counts = hi - lo
    rows = np.repeat(np.arange(len(test)), counts)
    starts = np.repeat(lo, counts)
    within = np.arange(len(rows)) - np.repeat(np.cumsum(counts) - counts, counts)
    seg_idx = ps[starts + within]
    e = test[rows]
    evec = np.hstack([xy[a[e]], xy[b[e]]])
    hit = segments_intersect(evec, segs[seg_idx])
    blocked = np.zeros(len(edges), dtype=bool)
    blocked[e[hit]] = True
    return edges[~blocked]


def _assemble(domain: PlanarDomain, patches: Sequence[Patch]) -> GridGraph:
    hmin = min(p.h for p in patches)
    all_key, all_xy, all_d, all_h, all_edges = [], [], [], [], []
    base = 0
    for patch in sorted(patches, key=lambda p: p.h):
        ij, xy, d = _patch_nodes(domain, patch)
        if len(ij) == 0:
            continue
        e = _patch_edges(ij)
        hull = (min(w[0] for w in patch.windows), min(w[1] for w in patch.windows),
                max(w[2] for w in patch.windows), max(w[3] for w in patch.windows))
        e = _filter_blocked(domain, xy, d, e, math.sqrt(5) * patch.h, hull)
        scale = int(round(patch.h / hmin))
        all_key.append(ij * scale)
        all_xy.append(xy)
        all_d.append(d)
        all_h.append(np.full(len(xy), patch.h))
        all_edges.append(e + base)
        base += len(xy)
    if not all_xy:
        raise EmptyGrid("no lattice node lies inside the domain and the window")
    key = np.vstack(all_key)
    xy = np.vstack(all_xy)
    d = np.concatenate(all_d)
    nh = np.concatenate(all_h)
    # merge coinciding nodes; the first occurrence comes from the finest patch
    ukey, first, inv = np.unique(key, axis=0, return_index=True, return_inverse=True)
    inv = inv.reshape(-1)
    # patches were added finest first, so the first occurrence carries the finest h
    xy, d, nh = xy[first], d[first], nh[first]
    edges = inv[np.vstack(all_edges)]
    edges = np.sort(edges, axis=1)
    edges = edges[edges[:, 0] != edges[:, 1]]
    edges = np.unique(edges, axis=0)
    n = len(xy)
    elen = np.hypot(*(xy[edges[:, 1]] - xy[edges[:, 0]]).T)
    # symmetric CSR with a permutation from data slots to edge ids
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    eid = np.concatenate([np.arange(len(edges)), np.arange(len(edges))])
    order = np.lexsort((cols, rows))
    rows, cols, eid = rows[order], cols[order], eid[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    indptr = np.cumsum(indptr)
    for arr in (xy, d, nh, edges, elen):
        arr.setflags(write=False)
    return GridGraph(domain, tuple(patches), xy, d, nh, edges.astype(np.int64), elen,
                     eid, indptr, cols.astype(np.int32))


def narrowest_width_in(domain: PlanarDomain, window) -> float | None:
    """Narrowest corridor width of decorations meeting the window (landmarks)."""
    x0, y0, x1, y1 = window
    widths = []
    for g in domain.landmarks.get("decorations", []):
        bx0, by0, bx1, by1 = g["bbox"]
        if bx1 < x0 or bx0 > x1 or by1 < y0 or by0 > y1:
            continue
        for part in g["parts"]:
            if part["x1"] >= x0 and part["x0"] <= x1:
                widths.append(part["width"])
    return min(widths) if widths else None


def build_grid(domain: PlanarDomain, window, h: float, check_resolution: bool = True) -> GridGraph:
    """Grid of spacing h over one window (or a list of windows sharing h)."""
    if not h > 0:
        raise ValueError("h must be positive")
    windows = tuple(tuple(float(v) for v in w) for w in
                    (window if isinstance(window[0], (tuple, list)) else [window]))
    if check_resolution:
        for w in windows:
            wmin = narrowest_width_in(domain, w)
            if wmin is not None and h > wmin / 6 * (1 + 1e-12):
                raise ResolutionTooCoarse(
                    f"h={h:g} exceeds narrowest corridor width {wmin:g} / 6")
    return _assemble(domain, [Patch(windows, float(h))])


def build_multigrid(domain: PlanarDomain, patches: Sequence[Patch],
                    probes: Sequence[Sequence] = ()) -> GridGraph:
    """Merge patches of dyadic spacings; probes are point chains that must stay connected."""
    g = _assemble(domain, list(patches))
    for chain in probes:
        labels = {int(g.component[g.snap(p)]) for p in chain}
        if len(labels) != 1:
            raise ResolutionTooCoarse("a corridor is disconnected end-to-end on the multigrid")
    return g


# ---------------------------------------------------------------------------
# decoration-local windows


def decoration_windows(geom: dict, margin_factor: float = 4.0) -> list:
    """Bounding box of a decoration plus a strip of the square next to the attachment."""
    r_out = geom["layers"][-1][1]
    m = margin_factor * r_out
    x0, y0, x1, y1 = geom["bbox"]
    a = geom["a"]
    return [(1.0 - m, a - 2 * r_out - m, 1.0, a + 2 * r_out + m), (1.0, y0, x1, y1)]


def midline_probes(geom: dict, corridors=(1, 2, 3, 4)) -> list:
    return [geom["midlines"][str(c)] for c in corridors]


def decoration_grid(domain: PlanarDomain, j: int, divisor: float = 8.0,
                    check_connectivity: bool = True) -> GridGraph:
    """Grid for decoration j: one spacing per part width, merged into a multigrid.

    Each part of distinct width gets a patch with h = dyadic(width/divisor)
    covering the part plus an overlap pad into its neighbours, so pinch
    regions are resolved by the finer of the two adjoining spacings.
    """
    from ..geometry.decorations import require_decoration

    g = require_decoration(domain, j)
    a = g["a"]
    x0b, y0b, x1b, y1b = g["bbox"]
    widths = sorted({p["width"] for p in g["parts"]})
    r_out = g["layers"][-1][1]
    patches = []
    if len(widths) == 1:
        h = dyadic_spacing(widths[0], divisor)
        patches.append(Patch(tuple(decoration_windows(g)), h))
    else:
        for w in widths:
            h = dyadic_spacing(w, divisor)
            wins = []
            for k, part in enumerate(g["parts"]):
                if part["width"] != w:
                    continue
                nb_pad = 0.0
                for pin in g["pinches"]:
                    if abs(pin["junction"] - part["x0"]) < 1e-15 or abs(pin["junction"] - part["x1"]) < 1e-15:
                        nb_pad = max(nb_pad, pin["x1"] - pin["x0"])
                pad = nb_pad + 8 * h
                xa = max(part["x0"] - pad, 1.0)
                xb = min(part["x1"] + pad, x1b)
                if part["kind"] == "diag":
                    wins.append((xa, y0b, xb, y1b))
                else:
                    # neighbouring diagonal pieces climb; cover their pinch heights too
                    ext = 2 * max(q["width"] for q in g["parts"]) + pad
                    wins.append((xa, a - ext, xb, a + ext))
                if part["side"] == "left" and k == 0:
                    m = 4 * r_out
                    wins.append((1.0 - m, a - 2 * r_out - m, 1.0, a + 2 * r_out + m))
            patches.append(Patch(tuple(wins), h))
    probes = midline_probes(g) if check_connectivity else ()
    return build_multigrid(domain, patches, probes)
