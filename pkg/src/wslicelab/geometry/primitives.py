"""Points, polylines, polygons and the vectorized predicates behind them.

Segment arrays are float arrays of shape (M, 4) holding (x0, y0, x1, y1).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ..errors import DomainInvalid

EPS = 1e-12
_CHUNK = 1 << 21  # max entries of a points x segments work matrix


class Point2(NamedTuple):
    x: float
    y: float


def as_point(p) -> Point2:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainInvalid(f"non-finite point {p!r}")
    return Point2(x, y)


def _as_vertices(pts: Iterable) -> tuple[Point2, ...]:
    return tuple(as_point(p) for p in pts)


def ring_segments(verts: np.ndarray) -> np.ndarray:
    return np.hstack([verts, np.roll(verts, -1, axis=0)])


def chain_segments(verts: np.ndarray) -> np.ndarray:
    return np.hstack([verts[:-1], verts[1:]])


def signed_area(verts: np.ndarray) -> float:
    x, y = verts[:, 0], verts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _orient(ax, ay, bx, by, cx, cy):
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _on_segment(ax, ay, bx, by, px, py):
    # assumes collinearity; closed bounding-box test
    return ((np.minimum(ax, bx) <= px) & (px <= np.maximum(ax, bx))
            & (np.minimum(ay, by) <= py) & (py <= np.maximum(ay, by)))


def segments_intersect(s: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Closed segment intersection test, broadcasting s (...,4) against t (...,4)."""
    ax, ay, bx, by = s[..., 0], s[..., 1], s[..., 2], s[..., 3]
    cx, cy, dx, dy = t[..., 0], t[..., 1], t[..., 2], t[..., 3]
    o1 = _orient(ax, ay, bx, by, cx, cy)
    o2 = _orient(ax, ay, bx, by, dx, dy)
    o3 = _orient(cx, cy, dx, dy, ax, ay)
    o4 = _orient(cx, cy, dx, dy, bx, by)
    hit = ((o1 * o2) < 0) & ((o3 * o4) < 0)
    hit |= (o1 == 0) & _on_segment(ax, ay, bx, by, cx, cy)
    hit |= (o2 == 0) & _on_segment(ax, ay, bx, by, dx, dy)
    hit |= (o3 == 0) & _on_segment(cx, cy, dx, dy, ax, ay)
    hit |= (o4 == 0) & _on_segment(cx, cy, dx, dy, bx, by)
    return hit


def point_segment_distance(pts: np.ndarray, segs: np.ndarray) -> np.ndarray:
    """Distance from each point (N,2) to the nearest segment of segs (M,4)."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    out = np.full(len(pts), np.inf)
    if len(segs) == 0 or len(pts) == 0:
        return out
    ax, ay = segs[:, 0], segs[:, 1]
    ux, uy = segs[:, 2] - ax, segs[:, 3] - ay
    uu = ux * ux + uy * uy
    uu_safe = np.where(uu > 0, uu, 1.0)
    step = max(1, _CHUNK // len(segs))
    for i in range(0, len(pts), step):
        px = pts[i:i + step, 0:1]
        py = pts[i:i + step, 1:2]
        wx, wy = px - ax, py - ay
        t = np.clip((wx * ux + wy * uy) / uu_safe, 0.0, 1.0)
        t = np.where(uu > 0, t, 0.0)
        dx, dy = wx - t * ux, wy - t * uy
        out[i:i + step] = np.sqrt(np.min(dx * dx + dy * dy, axis=1))
    return out


def point_in_ring(pts: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Even-odd crossing test; boundary points land on either side."""
    pts = np.asarray(pts, dtype=float).reshape(-1, 2)
    x0, y0 = verts[:, 0], verts[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    inside = np.zeros(len(pts), dtype=bool)
    step = max(1, _CHUNK // len(verts))
    for i in range(0, len(pts), step):
        px = pts[i:i + step, 0:1]
        py = pts[i:i + step, 1:2]
        straddle = (y0 > py) != (y1 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xcross = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
        crossings = straddle & (px < xcross)
        inside[i:i + step] = (np.count_nonzero(crossings, axis=1) % 2) == 1
    return inside


def _check_no_self_intersection(segs: np.ndarray, closed: bool, what: str) -> None:
    m = len(segs)
    if m < 2:
        return
    i, j = np.triu_indices(m, k=1)
    adjacent = (j == i + 1)
    if closed:
        adjacent |= (i == 0) & (j == m - 1)
    far = ~adjacent
    if np.any(segments_intersect(segs[i[far]], segs[j[far]])):
        raise DomainInvalid(f"{what} self-intersects")
    # adjacent edges may share only their common vertex: reject folding back
    ia, ja = i[adjacent], j[adjacent]
    a, b = segs[ia], segs[ja]
    da = a[:, 2:] - a[:, :2]
    db = b[:, 2:] - b[:, :2]
    cross = da[:, 0] * db[:, 1] - da[:, 1] * db[:, 0]
    dot = np.einsum("ij,ij->i", da, db)
    if np.any((np.abs(cross) <= EPS * np.hypot(*da.T) * np.hypot(*db.T)) & (dot < 0)):
        raise DomainInvalid(f"{what} folds back on itself")


@dataclass(frozen=True)
class Polyline:
    vertices: tuple[Point2, ...]

    def __init__(self, vertices: Iterable, check: bool = True):
        object.__setattr__(self, "vertices", _as_vertices(vertices))
        if check:
            self._validate()

    def _validate(self) -> None:
        if len(self.vertices) < 2:
            raise DomainInvalid("polyline needs at least two vertices")
        v = self.array
        if np.any(np.all(v[1:] == v[:-1], axis=1)):
            raise DomainInvalid("polyline has repeated consecutive vertices")
        _check_no_self_intersection(chain_segments(v), closed=False, what="polyline")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float).reshape(-1, 2)

    @property
    def segments(self) -> np.ndarray:
        return chain_segments(self.array)

    def length(self) -> float:
        v = self.array
        return float(np.sum(np.hypot(*(v[1:] - v[:-1]).T)))

    def reversed(self) -> "Polyline":
        return Polyline(self.vertices[::-1], check=False)


def path_polyline(vertices: Sequence) -> Polyline:
    """Polyline for a path (may revisit points); drops repeated consecutive vertices."""
    out: list[Point2] = []
    for p in vertices:
        q = as_point(p)
        if not out or out[-1] != q:
            out.append(q)
    if len(out) == 1:
        out.append(out[0])
        return _degenerate(out)
    return Polyline(out, check=False)


def _degenerate(out: list[Point2]) -> Polyline:
    pl = object.__new__(Polyline)
    object.__setattr__(pl, "vertices", tuple(out))
    return pl


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[Point2, ...]

    def __init__(self, vertices: Iterable, check: bool = True):
        object.__setattr__(self, "vertices", _as_vertices(vertices))
        if check:
            self._validate()

    def _validate(self) -> None:
        if len(self.vertices) < 3:
            raise DomainInvalid("polygon needs at least three vertices")
        v = self.array
        if np.any(np.all(v == np.roll(v, -1, axis=0), axis=1)):
            raise DomainInvalid("polygon has repeated consecutive vertices")
        if signed_area(v) <= 0:
            raise DomainInvalid("polygon must be counterclockwise with positive area")
        _check_no_self_intersection(ring_segments(v), closed=True, what="polygon")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float)

    @property
    def segments(self) -> np.ndarray:
        return ring_segments(self.array)

    def area(self) -> float:
        return signed_area(self.array)

    def bounds(self) -> tuple[float, float, float, float]:
        v = self.array
        return (float(v[:, 0].min()), float(v[:, 1].min()),
                float(v[:, 0].max()), float(v[:, 1].max()))

    @classmethod
    def rectangle(cls, x0: float, y0: float, x1: float, y1: float) -> "Polygon":
        return cls([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    @classmethod
    def ccw(cls, vertices: Iterable) -> "Polygon":
        """Build from vertices in either orientation."""
        v = [as_point(p) for p in vertices]
        if signed_area(np.array(v, dtype=float)) < 0:
            v.reverse()
        return cls(v)
