"""Standalone vector figures: domain boundary, slices, paths, grid nodes."""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .geometry.domain import PlanarDomain


class Figure:
    def __init__(self, window, width: int = 900, title: str = ""):
        x0, y0, x1, y1 = map(float, window)
        self.window = (x0, y0, x1, y1)
        self.width = width
        self.height = max(1, int(round(width * (y1 - y0) / (x1 - x0)))) if x1 > x0 else width
        self.scale = width / (x1 - x0)
        self.parts: list[str] = []
        self.title = title

    def _pt(self, p) -> str:
        x0, _, _, y1 = self.window
        return f"{(p[0] - x0) * self.scale:.3f},{(y1 - p[1]) * self.scale:.3f}"

    def polyline(self, pts, stroke="#000", width=1.0, fill="none", closed=False, opacity=1.0):
        tag = "polygon" if closed else "polyline"
        coords = " ".join(self._pt(p) for p in pts)
        self.parts.append(f'<{tag} points="{coords}" fill="{fill}" stroke="{stroke}" '
                          f'stroke-width="{width}" fill-opacity="{opacity}"/>')

    def dots(self, pts, values=None, r=1.5):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        if values is not None and len(values):
            v = np.asarray(values, dtype=float)
            span = float(v.max() - v.min()) or 1.0
            t = (v - v.min()) / span
        else:
            t = np.zeros(len(pts))
        for p, s in zip(pts, t):
            c = f"rgb({int(255 * s)},{int(80 + 100 * s)},{int(255 * (1 - s))})"
            x, y = self._pt(p).split(",")
            self.parts.append(f'<circle cx="{x}" cy="{y}" r="{r}" fill="{c}"/>')

    def label(self, p, text: str, size: int = 12):
        x, y = self._pt(p).split(",")
        self.parts.append(f'<text x="{x}" y="{y}" font-size="{size}">{escape(text)}</text>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
                f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">')
        title = f"<title>{escape(self.title)}</title>" if self.title else ""
        return "\n".join([head, title, '<rect width="100%" height="100%" fill="white"/>',
                          *self.parts, "</svg>"]) + "\n"


def domain_figure(domain: PlanarDomain, window=None, slices=(), paths=(), points=(),
                  grid=None, width: int = 900, title: str = "") -> str:
    window = window if window is not None else domain.bounds
    x0, y0, x1, y1 = window
    pad = 0.02 * max(x1 - x0, y1 - y0)
    fig = Figure((x0 - pad, y0 - pad, x1 + pad, y1 + pad), width, title)
    for poly in domain.outer:
        fig.polyline(poly.vertices, stroke="#222", closed=True, fill="#f4f4f4")
    for hole in domain.holes:
        fig.polyline(hole.vertices, stroke="#222", closed=True, fill="#ccc")
    for s in domain.slits:
        fig.polyline(s.vertices, stroke="#a00", width=1.2)
    for s in slices:
        for ring in s.clipped:
            fig.polyline(ring, stroke="#06c", closed=True, fill="#06c", opacity=0.15, width=0.5)
    if grid is not None:
        inside = ((grid.xy[:, 0] >= x0) & (grid.xy[:, 0] <= x1)
                  & (grid.xy[:, 1] >= y0) & (grid.xy[:, 1] <= y1))
        fig.dots(grid.xy[inside], grid.delta[inside], r=1.0)
    colors = ("#d60", "#080", "#808", "#066")
    for k, p in enumerate(paths):
        verts = p.vertices if hasattr(p, "vertices") else p
        fig.polyline(verts, stroke=colors[k % len(colors)], width=1.6)
    for name, p in (points.items() if isinstance(points, dict) else enumerate(points)):
        fig.dots([p], r=3)
        fig.label(p, str(name))
    return fig.render()
