"""Why EX32 fails the slice condition, made numeric for one decoration."""
from __future__ import annotations

import math

import numpy as np
from scipy.sparse.csgraph import dijkstra

from ..errors import WrongFamily
from ..geometry.decorations import Family, require_decoration
from ..geometry.domain import PlanarDomain
from ..geometry.primitives import Polyline, point_segment_distance
from ..metrics.grid import decoration_grid
from ..metrics.paths import alpha_csr, min_crossing_length
from ..metrics.quadrature import len_alpha_polyline
from ..reports import CheckReport
from .regions import SliceRegion, make_slice, rectangle_piece


def witness_points(g: dict) -> dict:
    a, R, r = g["a"], g["R"], g["r"]
    return {"y": (1 + R, a + 1.5 * r), "z": (1 + R, a + 0.5 * r), "u": (1 + 2 * R, a + R + 1.5 * r)}


def avoiding_route(g: dict) -> list[tuple[float, float]]:
    """Midline route from y to z through corridors 4, 1, 2, 3 (via the square-side gap)."""
    m = {c: [tuple(p) for p in g["midlines"][str(c)]] for c in "1234"}
    pts = witness_points(g)
    y, z = pts["y"], pts["z"]
    c4 = [p for p in m["4"] if p[0] < y[0]][::-1]
    c1 = m["1"]
    c2 = m["2"][::-1]
    c3 = [p for p in m["3"] if p[0] < z[0]]
    return [y] + c4 + c1 + c2 + c3 + [z]


def crossing_region(domain: PlanarDomain, g: dict, eps: float) -> SliceRegion:
    """Thin cross-section at x1 = 1 + 2R through corridors 1 and 4 (outside the U slit)."""
    a, R, r = g["a"], g["R"], g["r"]
    x = 1 + 2 * R
    up = rectangle_piece(x - eps, a + R + r, x + eps, a + R + 2 * r + eps)
    lo = rectangle_piece(x - eps, a - R - 2 * r - eps, x + eps, a - R - r)
    return make_slice(domain, [up, lo], label="witness-cross-section")


def slice_failure_witness(domain: PlanarDomain, j: int, C: float,
                          grid_policy: str = "auto") -> CheckReport:
    """Report whether the slice condition is impossible at decoration j for constant C.

    grid_policy: "auto" grids decorations with j <= 4, "always" forces it,
    "none" skips all grid measurements (arithmetic and exact geometry only).
    """
    g = require_decoration(domain, j)
    if g["family"] != Family.EX32.value:
        raise WrongFamily("the slice-failure witness concerns EX32 decorations")
    if C < 1:
        raise ValueError("C must be >= 1")
    R, r = g["R"], g["r"]
    pts = witness_points(g)
    rep = CheckReport("slice-failure witness", context={"j": j, "C": C, "R": R, "r": r})

    u = np.array([pts["u"]])
    delta_u = float(domain.raw_distance(u)[0])
    rep.add("delta(u)", delta_u < r, {"delta_u": delta_u, "r_over_2sqrt2": r / (2 * math.sqrt(2)),
                                      "r": r})

    route = avoiding_route(g)
    rv = np.array(route)
    far = float(point_segment_distance(u, np.hstack([rv[:-1], rv[1:]]))[0])
    rep.add("avoiding-route-distance", far > R, {"min_distance_to_u": far, "R": R})

    use_grid = grid_policy == "always" or (grid_policy == "auto" and j <= 4)
    if use_grid:
        grid = decoration_grid(domain, j)
        region = crossing_region(domain, g, eps=grid.h / 4)
        mc = min_crossing_length(grid, region, pts["y"], pts["z"])
        rep.add("paths-pass-through-corridors-1-or-4", mc > 0,
                {"min_crossing_of_corridor_1_4_section": mc, "section_half_width": grid.h / 4})
        k = dijkstra(alpha_csr(grid, 0.0), directed=True, indices=grid.snap(pts["u"]))
        ky, kz = float(k[grid.snap(pts["y"])]), float(k[grid.snap(pts["z"])])
        rep.add("k(u,{y,z})", None, {"k_u_y": ky, "k_u_z": kz, "k_u_yz": min(ky, kz)}, mandatory=False)
        try:
            route_len = len_alpha_polyline(domain, Polyline(route, check=False), 0.0, 1e-6)
            rep.add("avoiding-route-k-length", None, {"k_length": route_len}, mandatory=False)
        except Exception as exc:  # route is built from midlines; report instead of failing
            rep.add("avoiding-route-k-length", None, {"error": str(exc)}, mandatory=False)

    forced = R / (2 * C)
    impossible = forced > r
    rep.context["verdict"] = ("slice condition impossible at (j, C)" if impossible
                              else "inconclusive at this j")
    rep.context["impossible"] = impossible
    rep.add("forced-delta-bound", None,
            {"R_over_2C": forced, "r": r, "margin": forced / r, "measured_delta_u": delta_u},
            mandatory=False)
    return rep
