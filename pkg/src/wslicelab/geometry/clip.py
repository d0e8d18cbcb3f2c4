"""Clipping segments and polylines against unions of convex polygons."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .primitives import Polygon, Polyline, signed_area


def is_convex(verts: np.ndarray) -> bool:
    e = np.roll(verts, -1, axis=0) - verts
    f = np.roll(e, -1, axis=0)
    cross = e[:, 0] * f[:, 1] - e[:, 1] * f[:, 0]
    return bool(np.all(cross >= -1e-15 * np.abs(e).max() ** 2))


def clip_params(a: np.ndarray, b: np.ndarray, verts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyrus-Beck: parameter interval [t0, t1] of segments a->b inside a convex CCW polygon.

    Empty intervals come back with t1 <= t0.
    """
    a = np.asarray(a, float).reshape(-1, 2)
    b = np.asarray(b, float).reshape(-1, 2)
    v0 = verts
    e = np.roll(verts, -1, axis=0) - verts
    d = b - a
    # inside: cross(e_k, p - v_k) >= 0
    num = (e[None, :, 0] * (a[:, None, 1] - v0[None, :, 1])
           - e[None, :, 1] * (a[:, None, 0] - v0[None, :, 0]))
    den = e[None, :, 0] * d[:, None, 1] - e[None, :, 1] * d[:, None, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = -num / den
    t_enter = np.where(den > 0, t, -np.inf).max(axis=1)
    t_exit = np.where(den < 0, t, np.inf).min(axis=1)
    outside_parallel = np.any((den == 0) & (num < 0), axis=1)
    t0 = np.maximum(t_enter, 0.0)
    t1 = np.minimum(t_exit, 1.0)
    t1 = np.where(outside_parallel, t0, t1)
    return t0, t1


def inside_fraction(a: np.ndarray, b: np.ndarray, pieces: Sequence[np.ndarray]) -> np.ndarray:
    """Fraction of each segment inside the union of interior-disjoint convex pieces."""
    a = np.asarray(a, float).reshape(-1, 2)
    frac = np.zeros(len(a))
    for verts in pieces:
        if is_convex(verts):
            t0, t1 = clip_params(a, b, verts)
            frac += np.clip(t1 - t0, 0.0, 1.0)
        else:
            frac += _shapely_fraction(a, np.asarray(b, float).reshape(-1, 2), verts)
    return np.minimum(frac, 1.0)


def _shapely_fraction(a, b, verts) -> np.ndarray:
    import shapely
    from shapely.geometry import LineString, Polygon as SPolygon

    poly = SPolygon(verts)
    out = np.zeros(len(a))
    for i in range(len(a)):
        seg = LineString([a[i], b[i]])
        if seg.length > 0:
            out[i] = shapely.intersection(seg, poly).length / seg.length
    return out


def clip_polyline(path: Polyline, pieces: Sequence[np.ndarray]) -> list[Polyline]:
    """Sub-polylines of the path lying inside the union of convex pieces."""
    v = path.array
    runs: list[list] = []
    for verts in pieces:
        t0, t1 = clip_params(v[:-1], v[1:], verts)
        current: list = []
        for i in range(len(v) - 1):
            if t1[i] > t0[i]:
                p0 = v[i] + t0[i] * (v[i + 1] - v[i])
                p1 = v[i] + t1[i] * (v[i + 1] - v[i])
                if current and np.allclose(current[-1], p0, rtol=0, atol=1e-15):
                    current.append(p1)
                else:
                    if len(current) >= 2:
                        runs.append(current)
                    current = [p0, p1]
            else:
                if len(current) >= 2:
                    runs.append(current)
                current = []
        if len(current) >= 2:
            runs.append(current)
    out = []
    for run in runs:
        pts = [tuple(run[0])]
        for p in run[1:]:
            if tuple(p) != pts[-1]:
                pts.append(tuple(p))
        if len(pts) >= 2:
            out.append(Polyline(pts, check=False))
    return out


def polygon_distance(pt, verts: np.ndarray) -> float:
    """Euclidean distance from a point to a closed polygon (0 inside)."""
    from .primitives import point_in_ring, point_segment_distance, ring_segments

    p = np.asarray(pt, float).reshape(1, 2)
    if point_in_ring(p, verts)[0]:
        return 0.0
    return float(point_segment_distance(p, ring_segments(verts))[0])


def convex_inradius_at(pts: np.ndarray, verts: np.ndarray) -> np.ndarray:
    """Distance from inside points to the boundary of a convex CCW polygon (<0 outside)."""
    e = np.roll(verts, -1, axis=0) - verts
    n = np.hypot(e[:, 0], e[:, 1])
    s = (e[None, :, 0] * (pts[:, None, 1] - verts[None, :, 1])
         - e[None, :, 1] * (pts[:, None, 0] - verts[None, :, 0])) / n[None, :]
    return s.min(axis=1)


__all__ = ["clip_params", "inside_fraction", "clip_polyline", "polygon_distance",
           "convex_inradius_at", "is_convex", "signed_area", "Polygon"]
