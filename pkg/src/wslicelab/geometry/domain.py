"""The open planar region: outer polygons minus holes minus slits."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Sequence

import numpy as np

from ..errors import DomainInvalid, PointOutsideDomain
from .primitives import (EPS, Point2, Polygon, Polyline, as_point, point_in_ring,
                         point_segment_distance, segments_intersect)


@dataclass(frozen=True)
class PlanarDomain:
    """Omega = interior(union of outer) minus closed holes minus slits.

    `landmarks` carries builder metadata (decorations, midlines, spec echo); it
    does not take part in equality so a re-read domain compares equal by geometry
    plus landmarks through `same_as`.
    """

    outer: tuple[Polygon, ...]
    holes: tuple[Polygon, ...] = ()
    slits: tuple[Polyline, ...] = ()
    landmarks: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "outer", tuple(self.outer))
        object.__setattr__(self, "holes", tuple(self.holes))
        object.__setattr__(self, "slits", tuple(self.slits))
        if not self.outer:
            raise DomainInvalid("domain needs at least one outer polygon")
        self._check_slits_inside()

    # --- merged outer rings -------------------------------------------------
    @cached_property
    def _rings(self) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """(outer rings, extra interior rings) of the union of the outer polygons."""
        if len(self.outer) == 1:
            return [self.outer[0].array], []
        import shapely
        from shapely.geometry import Polygon as SPolygon

        merged = shapely.unary_union([SPolygon(p.array) for p in self.outer])
        if merged.geom_type != "Polygon":
            raise DomainInvalid("outer polygons do not form a connected region")
        ext = np.asarray(merged.exterior.coords)[:-1]
        ints = [np.asarray(r.coords)[:-1] for r in merged.interiors]
        return [ext], ints

    @cached_property
    def boundary_segments(self) -> np.ndarray:
        """Every boundary piece of Omega as an (M, 4) segment array."""
        outers, inners = self._rings
        parts = [np.hstack([r, np.roll(r, -1, axis=0)]) for r in outers + inners]
        parts += [h.segments for h in self.holes]
        parts += [s.segments for s in self.slits]
        segs = np.vstack(parts)
        segs.setflags(write=False)
        return segs

    @cached_property
    def bounds(self) -> tuple[float, float, float, float]:
        b = np.array([p.bounds() for p in self.outer])
        return (float(b[:, 0].min()), float(b[:, 1].min()),
                float(b[:, 2].max()), float(b[:, 3].max()))

    def _check_slits_inside(self) -> None:
        for s in self.slits:
            v = s.array
            mids = 0.5 * (v[1:] + v[:-1])
            pts = np.vstack([v, mids])
            inside = self._inside_outer_closure(pts)
            if not np.all(inside):
                raise DomainInvalid("slit leaves the closure of the outer region")

    def _inside_outer_closure(self, pts: np.ndarray) -> np.ndarray:
        outers, inners = self._rings
        segs = np.vstack([np.hstack([r, np.roll(r, -1, axis=0)]) for r in outers + inners])
        on_edge = point_segment_distance(pts, segs) <= EPS
        return on_edge | self._inside_outer_open_mask(pts)

    def _inside_outer_open_mask(self, pts: np.ndarray) -> np.ndarray:
        outers, inners = self._rings
        m = np.zeros(len(pts), dtype=bool)
        for r in outers:
            m |= point_in_ring(pts, r)
        for r in inners:
            m &= ~point_in_ring(pts, r)
        return m

    # --- vectorized queries -------------------------------------------------
    def raw_distance(self, pts) -> np.ndarray:
        """Distance to the nearest boundary piece, without a membership check."""
        return point_segment_distance(np.asarray(pts, dtype=float), self.boundary_segments)

    def contains_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        m = self._inside_outer_open_mask(pts)
        for h in self.holes:
            m &= ~point_in_ring(pts, h.array)
        if np.any(m):
            idx = np.flatnonzero(m)
            m[idx] = self.raw_distance(pts[idx]) > 0
        return m

    def delta_many(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        if not np.all(self.contains_many(pts)):
            raise PointOutsideDomain("some points lie outside the domain")
        return self.raw_distance(pts)

    def blocked_many(self, a: np.ndarray, b: np.ndarray, segs: np.ndarray | None = None) -> np.ndarray:
        """For each pair (a_i, b_i), whether the segment meets the boundary."""
        segs = self.boundary_segments if segs is None else segs
        e = np.hstack([np.asarray(a, float).reshape(-1, 2), np.asarray(b, float).reshape(-1, 2)])
        out = np.zeros(len(e), dtype=bool)
        if len(segs) == 0:
            return out
        step = max(1, (1 << 20) // len(segs))
        for i in range(0, len(e), step):
            blk = e[i:i + step, None, :]
            out[i:i + step] = np.any(segments_intersect(blk, segs[None, :, :]), axis=1)
        return out

    def decoration(self, j: int) -> dict | None:
        for d in self.landmarks.get("decorations", []):
            if d["j"] == j:
                return d
        return None

    def same_as(self, other: "PlanarDomain") -> bool:
        return self == other and _normalize(self.landmarks) == _normalize(other.landmarks)


def _normalize(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return float(obj)
    return obj


def make_domain(outer: Sequence[Iterable], holes: Sequence[Iterable] = (),
                slits: Sequence[Iterable] = (), landmarks: dict | None = None) -> PlanarDomain:
    return PlanarDomain(tuple(Polygon.ccw(p) for p in outer),
                        tuple(Polygon.ccw(h) for h in holes),
                        tuple(Polyline(s) for s in slits),
                        landmarks or {})


def unit_square() -> PlanarDomain:
    return PlanarDomain((Polygon.rectangle(0.0, 0.0, 1.0, 1.0),))


def rectangle_domain(x0: float, y0: float, x1: float, y1: float) -> PlanarDomain:
    return PlanarDomain((Polygon.rectangle(x0, y0, x1, y1),))


def contains(domain: PlanarDomain, pt) -> bool:
    return bool(domain.contains_many(np.array([as_point(pt)]))[0])


def distance_to_boundary(domain: PlanarDomain, pt) -> float:
    p = as_point(pt)
    if not contains(domain, p):
        raise PointOutsideDomain(f"{tuple(p)} is not in the domain")
    return float(domain.raw_distance(np.array([p]))[0])


def segment_blocked(domain: PlanarDomain, a, b) -> bool:
    pa, pb = as_point(a), as_point(b)
    for p in (pa, pb):
        if not contains(domain, p):
            raise PointOutsideDomain(f"{tuple(p)} is not in the domain")
    if pa == pb:
        return False
    return bool(domain.blocked_many(np.array([pa]), np.array([pb]))[0])


def connected_by_flood_fill(domain: PlanarDomain, h: float, window=None,
                            probes: Sequence[Point2] = ()) -> bool:
    """Lattice flood fill at spacing h; True if all probe points land in one component.

    With no probes, checks that all lattice nodes form a single component.
    """
    from ..metrics.grid import build_grid  # local import: grid depends on geometry

    g = build_grid(domain, window or domain.bounds, h, check_resolution=False)
    if probes:
        idx = [g.snap(p) for p in probes]
        labels = {int(g.component[i]) for i in idx}
        return len(labels) == 1
    return g.n_components == 1
