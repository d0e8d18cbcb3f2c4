"""Obstruction-pair measurements for the thin-short layer family at desk scale."""
from __future__ import annotations

import math

import numpy as np

from ..geometry.decorations import DecoratedSquareSpec, build_domain, require_decoration
from ..geometry.domain import PlanarDomain
from ..geometry.primitives import Polyline
from ..metrics.grid import GridGraph, decoration_grid
from ..metrics.paths import d_alpha, min_crossing_length
from ..metrics.quadrature import len_alpha_polyline
from ..slices.corridors import SliceKind, local_width, make_corridor_slices
from .report import ExperimentReport, provenance


def obstruction_pair(g: dict) -> tuple[tuple, tuple]:
    """y above and z below the U slit, half way along the outermost left layer."""
    Rp, rp = g["layers"][-1]
    a = g["a"]
    return (1 + Rp / 2, a + 1.5 * rp), (1 + Rp / 2, a + 0.5 * rp)


def _midline(g: dict, c: int) -> list[tuple[float, float]]:
    return [(float(x), float(y)) for x, y in g["midlines"][str(c)]]


def midline_routes(g: dict, y, z) -> dict[str, list]:
    """Two explicit y-z routes along corridor midlines.

    "right-end": corridor 4 to its far end, across to corridor 3, back to z.
    "left-gap": corridor 4 back to the square side, corridors 1 and 2 out and back,
    then around the tip of the inner slit into corridor 3.
    """
    m = {c: _midline(g, c) for c in (1, 2, 3, 4)}
    y, z = tuple(y), tuple(z)
    right = [y] + [p for p in m[4] if p[0] > y[0]] + [p for p in m[3] if p[0] > z[0]][::-1] + [z]
    left = ([y] + [p for p in m[4] if p[0] < y[0]][::-1] + m[1] + m[2][::-1]
            + [p for p in m[3] if p[0] < z[0]] + [z])
    return {"right-end": right, "left-gap": left}


def midline_bound(domain: PlanarDomain, g: dict, y, z, alpha: float,
                  tol: float = 1e-7) -> tuple[float, dict]:
    """min over the explicit routes of their quadrature alpha-length (an upper bound)."""
    out = {}
    for name, pts in midline_routes(g, y, z).items():
        out[name] = len_alpha_polyline(domain, Polyline(pts, check=False), alpha, tol)
    return min(out.values()), out


def mandatory_slices(domain: PlanarDomain, j: int, y) -> list:
    """Corridor slices that every y-z path crosses twice: right slices and left slices past y."""
    right = make_corridor_slices(domain, j, SliceKind.RIGHT)
    left = [s for s in make_corridor_slices(domain, j, SliceKind.LEFT) if s.x_range()[0] > y[0]]
    return left + right


def crossing_lower_bound(domain: PlanarDomain, j: int, y, alpha: float) -> float:
    """sum over mandatory slices of 2 * strip width * (half corridor width)^(alpha - 1).

    Every route enters and leaves each mandatory strip through a pair of layer corridors,
    so it runs at least twice the strip width inside it, where delta <= width/2.
    """
    g = require_decoration(domain, j)
    total = 0.0
    for s in mandatory_slices(domain, j, y):
        x0, x1 = s.x_range()
        w = local_width(g, 0.5 * (x0 + x1))
        total += 2 * (x1 - x0) * (w / 2) ** (alpha - 1)
    return total


def right_slice_sigma(domain: PlanarDomain, j: int, y, z, alpha: float) -> float:
    d = domain.raw_distance(np.array([y, z]))
    right = make_corridor_slices(domain, j, SliceKind.RIGHT)
    return float(d[0] ** alpha + d[1] ** alpha + sum(s.d_S ** alpha for s in right))


def crossing_sanity(grid: GridGraph, j: int, y, z, n_check: int = 3) -> list[dict]:
    """Grid min-crossing of a few mandatory strips against twice their width."""
    sl = mandatory_slices(grid.domain, j, y)
    if not sl:
        return []
    idx = sorted(set(np.linspace(0, len(sl) - 1, n_check).round().astype(int).tolist()))
    out = []
    for i in idx:
        s = sl[i]
        x0, x1 = s.x_range()
        mc = min_crossing_length(grid, s, y, z)
        out.append({"label": s.label, "min_crossing": mc, "twice_width": 2 * (x1 - x0),
                    "ok": bool(mc >= 2 * (x1 - x0) * (1 - 1e-9))})
    return out


def obstruction_measurements(spec: DecoratedSquareSpec, j: int, alphas,
                             grid: GridGraph | None = None, domain: PlanarDomain | None = None,
                             n_sanity: int = 3) -> dict:
    dom = domain if domain is not None else build_domain(spec)
    g = require_decoration(dom, j)
    grid = grid if grid is not None else decoration_grid(dom, j)
    y, z = obstruction_pair(g)
    R, r = g["R"], g["r"]
    Rp, rp = g["layers"][-1]
    rows = []
    for a in alphas:
        L = R / r ** (1 - a)
        Lp = Rp / rp ** (1 - a)
        mid, per_route = midline_bound(dom, g, y, z, a)
        est = d_alpha(grid, y, z, a).value
        lower = crossing_lower_bound(dom, j, y, a)
        sig = right_slice_sigma(dom, j, y, z, a)
        rows.append({"j": j, "alpha": a, "L": L, "L_prime": Lp, "L_sum": L + Lp,
                     "midline_bound": mid, "midline_routes": per_route, "d_alpha_grid": est,
                     "lower_bound": lower, "sigma_alpha": sig, "sigma_over_d": sig / est,
                     "sigma_over_L_prime": sig / Lp,
                     "bracketing": bool(mid >= est >= lower),
                     "pairwise_factor": _spread([mid, est, L + Lp])})
    return {"j": j, "y": list(y), "z": list(z), "grid": grid.summary(), "rows": rows,
            "crossing_sanity": crossing_sanity(grid, j, y, z, n_sanity)}


def _spread(vals) -> float:
    return max(vals) / min(vals)


def thm43_obstruction(alpha0: float = 0.5, p: float = 3, q: float = 6, js=(2, 3),
                      alphas=(0.25, 0.5, 0.75), family: str = "thm43",
                      toy: bool = True) -> ExperimentReport:
    """Obstruction-pair table per (j, alpha) plus the per-unit-j decay of sigma/d."""
    rows, per_j = [], {}
    for j in js:
        spec = (DecoratedSquareSpec.ex44(alpha0, p, q, j, j) if family == "ex44"
                else DecoratedSquareSpec.thm43(alpha0, p, q, j, j))
        m = obstruction_measurements(spec, j, list(alphas))
        per_j[str(j)] = {k: m[k] for k in ("y", "z", "grid", "crossing_sanity")}
        for row in m["rows"]:
            rows.append({k: v for k, v in row.items() if k != "midline_routes"}
                        | {"route_" + k: v for k, v in row["midline_routes"].items()})
    decay = {}
    js_sorted = sorted(js)
    for a in alphas:
        ratio = {r["j"]: r["sigma_over_d"] for r in rows if r["alpha"] == a}
        steps = [math.log2(ratio[j0] / ratio[j1]) / (j1 - j0)
                 for j0, j1 in zip(js_sorted, js_sorted[1:])]
        decay[str(a)] = {"log2_decay_per_j": steps, "predicted": a - alpha0}
    summary = {"per_j": per_j, "sigma_over_d_decay": decay,
               "evidence_tier": ("exponent computation, obstruction-pair measurement and "
                                 "toy strip-family exhaustion; not a proof of nonexistence")}
    if toy:
        summary["toy_exhaustion"] = toy_exhaustion()
    params = {"alpha0": alpha0, "p": p, "q": q, "js": list(js), "alphas": list(alphas),
              "family": family, "toy": toy}
    cols = ("j", "alpha", "L", "L_prime", "L_sum", "midline_bound", "d_alpha_grid", "lower_bound",
            "sigma_alpha", "sigma_over_d", "sigma_over_L_prime", "bracketing", "pairwise_factor")
    prov = provenance(h_policy="dyadic, largest power of two <= part width / 8",
                      tolerances={"quadrature": 1e-7})
    return ExperimentReport(f"{family}-obstruction", params, rows, summary, prov, cols)


# ---------------------------------------------------------------------------
# toy strip-family exhaustion


def toy_ring_domain(hole: int = 8, run: int = 6, left: int = 8, right: int = 4) -> PlanarDomain:
    """Lattice-scale ring of four width-2 corridors with the decoration topology.

    The upper and lower corridor pairs leave the left block, run around a
    rectangular hole of half-height `hole`, and meet again in the right block.
    Units are lattice spacings: grid it with h = 1.
    """
    H, m = float(hole), float(run)
    xr = 16 + m                      # start of the right block
    xe = xr + right                  # right wall
    top = [(xe, 4), (xr, 4), (xr, H + 4), (8, H + 4), (8, 4), (-1, 4)]
    outer = [(-1, -4), (8, -4), (8, -H - 4), (xr, -H - 4), (xr, -4), (xe, -4)] + top
    hole_ring = [(12, -H), (12 + m, -H), (12 + m, H), (12, H)]
    u_upper = [(xe - 2, 2), (14 + m, 2), (14 + m, H + 2), (10, H + 2), (10, 2), (1, 2)]
    u = u_upper + [(x, -y) for x, y in u_upper[::-1]]
    slits = [u, [(3, 0), (12, 0)], [(12 + m, 0), (xe, 0)]]
    from ..geometry.domain import make_domain
    return make_domain([outer], holes=[hole_ring], slits=slits, landmarks={"toy": True})


def toy_pair() -> tuple[tuple, tuple]:
    return (5.0, 3.0), (5.0, 1.0)


def toy_grid(domain: PlanarDomain) -> GridGraph:
    from ..metrics.grid import build_grid
    return build_grid(domain, domain.bounds, 1.0, check_resolution=False)


def strip_candidates(grid: GridGraph, x, y) -> list[dict]:
    """Every full-height vertical strip between half-lattice abscissae, with its measures."""
    from ..errors import EndpointInsideSlice
    from ..slices.regions import make_slice, rectangle_piece
    dom = grid.domain
    x0, y0, x1, y1 = dom.bounds
    cuts = np.arange(math.floor(x0) + 0.5, math.ceil(x1), 1.0)
    out = []
    for i in range(len(cuts)):
        for k in range(i + 1, len(cuts)):
            s = make_slice(dom, [rectangle_piece(cuts[i], y0 - 1, cuts[k], y1 + 1)],
                           label=f"strip[{cuts[i]:g},{cuts[k]:g}]")
            if not s.clipped:
                continue
            try:
                mc = min_crossing_length(grid, s, x, y)
            except EndpointInsideSlice:
                continue
            out.append({"slice": s, "x0": float(cuts[i]), "x1": float(cuts[k]), "d_S": s.d_S,
                        "crossing": mc, "clear_x": s.distance_to(x), "clear_y": s.distance_to(y)})
    return out


def best_strip_dataset(cands: list[dict], dx: float, dy: float, alpha: float, C: float):
    """Maximum of sum d_S^alpha over pairwise disjoint admissible strips (interval scheduling)."""
    ok = [c for c in cands if c["crossing"] >= c["d_S"] / C and c["clear_x"] >= dx / C
          and c["clear_y"] >= dy / C]
    ok.sort(key=lambda c: c["x1"])
    ends = [c["x1"] for c in ok]
    best = [0.0] * (len(ok) + 1)
    take: list = [None] * (len(ok) + 1)
    for i, c in enumerate(ok, 1):
        j = int(np.searchsorted(ends, c["x0"], side="right"))
        with_c = best[j] + c["d_S"] ** alpha
        if with_c > best[i - 1]:
            best[i], take[i] = with_c, (j, c)
        else:
            best[i], take[i] = best[i - 1], None
    chosen, i = [], len(ok)
    while i > 0:
        if take[i] is None:
            i -= 1
        else:
            j, c = take[i]
            chosen.append(c)
            i = j
    return best[-1], chosen[::-1], len(ok)


def exhaust_strips(grid: GridGraph, x, y, alpha: float, C: float, cands=None) -> dict:
    """Exact search over the strip family: is there a dataset meeting all three conditions?

    The toy grid is the whole path family here, so crossings are compared with
    d_S/C without a discretization allowance.
    """
    cands = strip_candidates(grid, x, y) if cands is None else cands
    dx, dy = (float(v) for v in grid.domain.raw_distance(np.array([x, y])))
    d = d_alpha(grid, x, y, alpha).value
    sig, chosen, n_ok = best_strip_dataset(cands, dx, dy, alpha, C)
    total = dx ** alpha + dy ** alpha + sig
    return {"alpha": alpha, "C": C, "d_alpha": d, "best_sigma": total,
            "passes": bool(d <= C * total), "n_candidates": len(cands), "n_admissible": n_ok,
            "chosen": [c["slice"].label for c in chosen]}


def toy_exhaustion(alpha: float = 0.75, C: float = 1.5, alphas=(0.0, 0.25, 0.5, 0.75)) -> dict:
    """Obstruction pair on the toy ring, plus two cases showing the search can succeed.

    smallest_passing_C_by_alpha records where the strip family starts to pass;
    at lattice scale it falls with alpha, since the exponent gap needs scale separation.
    """
    from ..slices.conditions import smallest_passing_C
    dom = toy_ring_domain()
    grid = toy_grid(dom)
    y, z = toy_pair()
    cands = strip_candidates(grid, y, z)
    main = exhaust_strips(grid, y, z, alpha, C, cands)

    def c_min(a):
        return smallest_passing_C(lambda c: exhaust_strips(grid, y, z, a, c, cands)["passes"],
                                  1.0, 64.0, 40)

    near_a, near_b = (4.0, 3.0), (6.0, 3.0)
    near = exhaust_strips(grid, near_a, near_b, alpha, C)
    loose = exhaust_strips(grid, y, z, alpha, 64.0, cands)
    return {"n_nodes": grid.n_nodes, "n_edges": grid.n_edges, "pair": [list(y), list(z)],
            "obstruction": main, "smallest_passing_C": c_min(alpha),
            "smallest_passing_C_by_alpha": {str(a): c_min(a) for a in alphas},
            "sanity_near_pair": near, "sanity_large_C": loose}
