"""Slit polygonal domains and the decoration builders."""
from .primitives import EPS, Point2, Polygon, Polyline, as_point, path_polyline
from .domain import (PlanarDomain, connected_by_flood_fill, contains, distance_to_boundary,
                     make_domain, rectangle_domain, segment_blocked, unit_square)
from .decorations import (AllowableQuadruple, DecoratedSquareSpec, DecorationSpec, Family,
                          RModifier, allowable_violations, build_domain, classify_corridor,
                          corridor_midline, decorated_square, decoration_geometry,
                          profile_offsets, require_decoration)
from .io import domain_dumps, domain_loads, dumps, load_domain, save_domain

__all__ = [
    "EPS", "Point2", "Polygon", "Polyline", "as_point", "path_polyline",
    "PlanarDomain", "connected_by_flood_fill", "contains", "distance_to_boundary",
    "make_domain", "rectangle_domain", "segment_blocked", "unit_square",
    "AllowableQuadruple", "DecoratedSquareSpec", "DecorationSpec", "Family", "RModifier",
    "allowable_violations", "build_domain", "classify_corridor", "corridor_midline",
    "decorated_square", "decoration_geometry", "profile_offsets", "require_decoration",
    "domain_dumps", "domain_loads", "dumps", "load_domain", "save_domain",
]
