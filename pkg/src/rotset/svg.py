"""Minimal SVG writer for planar figures (polygons, polylines, points, text)."""

from xml.sax.saxutils import escape

import numpy as np


class Figure:
    """Collects shapes in data coordinates and renders them to a fixed-size SVG.

    The y axis points up, as in the data.
    """

    def __init__(self, width=480, height=480, pad=24):
        self.width, self.height, self.pad = width, height, pad
        self._items = []
        self._pts = []

    def _track(self, pts):
        pts = np.atleast_2d(np.asarray(pts, float))
        if pts.size:
            self._pts.append(pts[:, :2])
        return pts

    def polygon(self, pts, stroke="black", fill="none", width=1.5, opacity=1.0):
        self._items.append(("polygon", self._track(pts), dict(stroke=stroke, fill=fill,
                                                               width=width, opacity=opacity)))

    def polyline(self, pts, stroke="black", width=1.0, closed=False):
        pts = self._track(pts)
        if closed and len(pts):
            pts = np.vstack([pts, pts[:1]])
        self._items.append(("polyline", pts, dict(stroke=stroke, width=width)))

    def points(self, pts, color="black", r=2.5):
        self._items.append(("points", self._track(pts), dict(color=color, r=r)))

    def text(self, xy, label, size=11):
        self._items.append(("text", self._track([xy]), dict(label=label, size=size)))

    def _transform(self):
        allp = np.vstack(self._pts) if self._pts else np.zeros((1, 2))
        lo, hi = allp.min(axis=0), allp.max(axis=0)
        span = max(float((hi - lo).max()), 1e-12)
        scale = min(self.width, self.height) - 2 * self.pad
        scale /= span
        centre = (lo + hi) / 2

        def f(p):
            x = self.width / 2 + (p[:, 0] - centre[0]) * scale
            y = self.height / 2 - (p[:, 1] - centre[1]) * scale
            return np.column_stack([x, y])
        return f

    def render(self):
        f = self._transform()
        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" '
               f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">',
               f'<rect width="{self.width}" height="{self.height}" fill="white"/>']
        for kind, pts, st in self._items:
            xy = f(pts)
            coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in xy)
            if kind == "polygon":
                out.append(f'<polygon points="{coords}" stroke="{st["stroke"]}" '
                           f'fill="{st["fill"]}" stroke-width="{st["width"]}" '
                           f'fill-opacity="{st["opacity"]}"/>')
            elif kind == "polyline":
                out.append(f'<polyline points="{coords}" stroke="{st["stroke"]}" fill="none" '
                           f'stroke-width="{st["width"]}"/>')
            elif kind == "points":
                out.extend(f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{st["r"]}" '
                           f'fill="{st["color"]}"/>' for x, y in xy)
            else:
                x, y = xy[0]
                out.append(f'<text x="{x:.2f}" y="{y:.2f}" font-size="{st["size"]}" '
                           f'font-family="sans-serif">{escape(st["label"])}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.render())
