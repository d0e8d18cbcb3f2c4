"""Corridor slices of a decoration and the pair-by-pair choice of admissible families."""
from __future__ import annotations

from enum import Enum

import numpy as np

from ..errors import PointsNotInDecoration, TooCloseToBoundary
from ..geometry.decorations import classify_corridor, require_decoration
from ..geometry.domain import PlanarDomain
from ..geometry.primitives import as_point
from .regions import SliceRegion, WsliceDataset, make_slice, rectangle_piece


class SliceKind(str, Enum):
    LEFT = "LEFT"
    UPPER = "UPPER"
    LOWER = "LOWER"
    RIGHT = "RIGHT"


def _strip_edges(x0: float, x1: float, n: int) -> list[float]:
    return [x0 + (x1 - x0) * i / n for i in range(n)] + [x1]


def make_corridor_slices(domain: PlanarDomain, j: int, kind) -> list[SliceRegion]:
    kind = SliceKind(kind)
    cache = domain.__dict__.setdefault("_corridor_slices", {})
    key = (j, kind)
    if key in cache:
        return list(cache[key])
    g = require_decoration(domain, j)
    a = g["a"]
    _, y0, _, y1 = g["bbox"]
    pad = 0.25 * g["layers"][-1][1]
    lo, hi = y0 - pad, y1 + pad
    if kind is SliceKind.UPPER:
        lo = a
    elif kind is SliceKind.LOWER:
        hi = a
    out = []
    for x0, x1, n in g["slice_ranges"][kind.value]:
        xs = _strip_edges(x0, x1, int(n))
        for i in range(len(xs) - 1):
            piece = rectangle_piece(xs[i], lo, xs[i + 1], hi)
            out.append(make_slice(domain, [piece], label=f"j{j}-{kind.value}-{len(out)}"))
    cache[key] = tuple(out)
    return out


def all_corridor_slices(domain: PlanarDomain, j: int) -> dict[SliceKind, list[SliceRegion]]:
    return {k: make_corridor_slices(domain, j, k) for k in SliceKind}


def local_width(g: dict, x1: float) -> float:
    for part in g["parts"]:
        if part["x0"] <= x1 <= part["x1"]:
            return part["width"]
    return g["layers"][-1][1]


def _clear(s: SliceRegion, pts, r: float) -> bool:
    return all(s.distance_to(p) >= r for p in pts)


def admissible_for_pair(domain: PlanarDomain, j: int, x, y, C: float = 10.0,
                        alpha: float = 0.0) -> WsliceDataset:
    """The corridor-slice family matching the corridors that contain x and y."""
    g = require_decoration(domain, j)
    x, y = as_point(x), as_point(y)
    if x == y:
        return WsliceDataset(x, y, C, alpha, ())
    cx, cy = classify_corridor(g, x), classify_corridor(g, y)
    if cx is None or cy is None or not all(domain.contains_many(np.array([x, y]))):
        raise PointsNotInDecoration(f"points must lie in decoration {j}")
    for p in (x, y):
        w = local_width(g, p[0])
        if domain.raw_distance(np.array([p]))[0] < w / 4:
            raise TooCloseToBoundary(f"{tuple(p)} is closer than r/4 to the boundary")
    r = g["r"]
    # name the pair so that the first point has the smaller first coordinate
    (p, cp), (q, cq) = sorted([(x, cx), (y, cy)], key=lambda t: (t[0][0], t[0][1]))
    sl = all_corridor_slices(domain, j)
    pair = frozenset((cp, cq))
    chosen: list[SliceRegion] = []
    if cp == cq:
        side = SliceKind.UPPER if cp in (3, 4) else SliceKind.LOWER
        lo, hi = p[0] + r, q[0] - r
        for kind in (SliceKind.LEFT, side, SliceKind.RIGHT):
            chosen += [s for s in sl[kind] if s.x_range()[0] >= lo and s.x_range()[1] <= hi]
    elif pair in ({3, 4}, {1, 2}):
        lo = min(p[0], q[0])
        chosen += [s for s in sl[SliceKind.RIGHT] if s.x_range()[0] >= lo and _clear(s, (p, q), r)]
    elif pair in ({1, 4}, {2, 3}):
        hi = max(p[0], q[0])
        chosen += [s for s in sl[SliceKind.LEFT] if s.x_range()[1] <= hi and _clear(s, (p, q), r)]
    else:  # {2,4} or {1,3}: every route runs through both rectangles
        for kind in (SliceKind.LEFT, SliceKind.RIGHT):
            chosen += [s for s in sl[kind] if _clear(s, (p, q), r)]
    chosen.sort(key=lambda s: s.x_range()[0])
    return WsliceDataset(x, y, C, alpha, tuple(chosen))
