"""Slice regions and wslice datasets."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from ..geometry.domain import PlanarDomain
from ..geometry.io import dumps, write_atomic
from ..geometry.primitives import EPS, Point2, Polygon, as_point, point_in_ring, point_segment_distance, ring_segments


def omega_shape(domain: PlanarDomain):
    """Shapely polygon of the outer region minus holes (slits have no area)."""
    cache = domain.__dict__.get("_omega_shape")
    if cache is None:
        from shapely.geometry import Polygon as SPolygon

        outers, inners = domain._rings
        poly = SPolygon(outers[0], [r for r in inners])
        for h in domain.holes:
            poly = poly.difference(SPolygon(h.array))
        cache = poly
        domain.__dict__["_omega_shape"] = cache
    return cache


def _ccw(verts) -> np.ndarray:
    v = np.asarray(verts, dtype=float)
    x, y = v[:, 0], v[:, 1]
    if np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y) < 0:
        v = v[::-1]
    return v


@dataclass(frozen=True, eq=False)
class SliceRegion:
    """S = (union of pieces) intersected with Omega, with its associated d_S.

    Pieces are CCW vertex arrays; they should be convex for fast clipping.
    """

    pieces: tuple
    d_S: float
    label: str = ""
    clipped: tuple = field(default=(), repr=False)   # vertex rings of S's polygon parts
    diameter: float = 0.0

    @property
    def shape(self) -> Polygon:
        return Polygon(self.pieces[0])

    @cached_property
    def bounds(self) -> tuple[float, float, float, float]:
        v = np.vstack(self.pieces)
        return float(v[:, 0].min()), float(v[:, 1].min()), float(v[:, 0].max()), float(v[:, 1].max())

    def closure_contains(self, pt) -> bool:
        p = np.array([as_point(pt)], dtype=float)
        for v in self.pieces:
            if point_in_ring(p, v)[0] or point_segment_distance(p, ring_segments(v))[0] <= EPS:
                return True
        return False

    def inside_mask(self, pts: np.ndarray) -> np.ndarray:
        m = np.zeros(len(pts), dtype=bool)
        for v in self.pieces:
            m |= point_in_ring(pts, v)
        return m

    def closure_mask(self, pts: np.ndarray) -> np.ndarray:
        m = self.inside_mask(pts)
        for v in self.pieces:
            m |= point_segment_distance(pts, ring_segments(v)) <= EPS
        return m

    def distance_to(self, pt) -> float:
        """Euclidean distance from a point to S (the clipped region)."""
        p = np.array([as_point(pt)], dtype=float)
        best = np.inf
        for ring in self.clipped:
            if point_in_ring(p, ring)[0]:
                return 0.0
            best = min(best, float(point_segment_distance(p, ring_segments(ring))[0]))
        return best

    def x_range(self) -> tuple[float, float]:
        b = self.bounds
        return b[0], b[2]

    def to_dict(self) -> dict:
        return {"polygon": [v.tolist() for v in self.pieces], "d_S": self.d_S, "label": self.label}


def _clip_rings(domain: PlanarDomain, pieces) -> list[np.ndarray]:
    import shapely
    from shapely.geometry import Polygon as SPolygon

    om = omega_shape(domain)
    rings = []
    for v in pieces:
        inter = shapely.intersection(SPolygon(v), om)
        geoms = getattr(inter, "geoms", [inter])
        for g in geoms:
            if g.geom_type == "Polygon" and g.area > 0:
                rings.append(_ccw(np.asarray(g.exterior.coords)[:-1]))
    return rings


def _ring_diameter(rings: Sequence[np.ndarray]) -> float:
    if not rings:
        return 0.0
    v = np.vstack(rings)
    d = np.sqrt(((v[:, None, :] - v[None, :, :]) ** 2).sum(-1))
    return float(d.max())


def make_slice(domain: PlanarDomain, pieces, d_S: float | None = None, label: str = "") -> SliceRegion:
    """Clip the pieces to Omega; d_S defaults to the clipped region's diameter."""
    if isinstance(pieces, Polygon):
        pieces = [pieces.array]
    pieces = tuple(_ccw(p.array if isinstance(p, Polygon) else p) for p in pieces)
    rings = _clip_rings(domain, pieces)
    if not rings:
        raise ValueError(f"slice {label!r} does not meet the domain")
    diam = _ring_diameter(rings)
    if d_S is None:
        d_S = diam
    elif d_S < diam * (1 - 1e-12):
        raise ValueError(f"d_S={d_S:g} is below the slice diameter {diam:g}")
    return SliceRegion(pieces, float(d_S), label, tuple(rings), diam)


def rectangle_piece(x0: float, y0: float, x1: float, y1: float) -> np.ndarray:
    return np.array([(x0, y0), (x1, y0), (x1, y1), (x0, y1)], dtype=float)


@dataclass(frozen=True, eq=False)
class WsliceDataset:
    x: Point2
    y: Point2
    C: float
    alpha: float
    slices: tuple

    def __post_init__(self):
        object.__setattr__(self, "x", as_point(self.x))
        object.__setattr__(self, "y", as_point(self.y))
        object.__setattr__(self, "slices", tuple(self.slices))
        if not self.C >= 1:
            raise ValueError("C must be >= 1")
        if not 0 <= self.alpha < 1:
            raise ValueError("alpha must lie in [0, 1)")
        _check_disjoint(self.slices)

    def with_C(self, C: float) -> "WsliceDataset":
        return WsliceDataset(self.x, self.y, C, self.alpha, self.slices)

    def with_alpha(self, alpha: float) -> "WsliceDataset":
        return WsliceDataset(self.x, self.y, self.C, alpha, self.slices)

    def to_dict(self) -> dict:
        return {"x": list(self.x), "y": list(self.y), "C": self.C, "alpha": self.alpha,
                "slices": [s.to_dict() for s in self.slices]}


def _check_disjoint(slices: Sequence[SliceRegion]) -> None:
    if len(slices) < 2:
        return
    import shapely
    from shapely.geometry import Polygon as SPolygon

    boxes = np.array([s.bounds for s in slices])
    polys = [shapely.unary_union([SPolygon(r) for r in s.clipped]) for s in slices]
    for i in range(len(slices)):
        bi = boxes[i]
        cand = np.flatnonzero((boxes[:, 0] < bi[2]) & (boxes[:, 2] > bi[0])
                              & (boxes[:, 1] < bi[3]) & (boxes[:, 3] > bi[1]))
        for k in cand[cand > i]:
            area = polys[i].intersection(polys[k]).area
            if area > 1e-12 * max(min(polys[i].area, polys[k].area), 1e-300):
                raise ValueError(f"slices {slices[i].label!r} and {slices[k].label!r} overlap")


def dataset_from_dict(domain: PlanarDomain, d: dict) -> WsliceDataset:
    slices = []
    for i, s in enumerate(d.get("slices", [])):
        poly = s["polygon"]
        pieces = poly if (poly and isinstance(poly[0][0], (list, tuple))) else [poly]
        slices.append(make_slice(domain, [np.asarray(p, float) for p in pieces], s.get("d_S"),
                                 s.get("label", f"S{i}")))
    return WsliceDataset(tuple(d["x"]), tuple(d["y"]), float(d.get("C", 10.0)),
                         float(d.get("alpha", 0.0)), tuple(slices))


def save_dataset(ds: WsliceDataset, path) -> Path:
    return write_atomic(path, dumps(ds.to_dict()) + "\n")


def load_dataset(domain: PlanarDomain, path) -> WsliceDataset:
    return dataset_from_dict(domain, json.loads(Path(path).read_text()))
