"""Subhyperbolic lengths by quadrature and d_alpha estimates on lattice graphs."""
from .grid import (GridGraph, Patch, build_grid, build_multigrid, decoration_grid,
                   decoration_windows, dyadic_spacing)
from .paths import (MetricParams, PathEstimate, PathKind, check_uniform_path, d_alpha,
                    distances_from, min_crossing_length, with_endpoints)
from .quadrature import len_alpha_pieces, len_alpha_polyline

__all__ = ["GridGraph", "Patch", "build_grid", "build_multigrid", "decoration_grid",
           "decoration_windows", "dyadic_spacing", "MetricParams", "PathEstimate", "PathKind",
           "check_uniform_path", "d_alpha", "distances_from", "min_crossing_length",
           "with_endpoints", "len_alpha_pieces", "len_alpha_polyline"]
