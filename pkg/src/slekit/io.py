"""CSV, JSON and SVG output.

Floats in CSV and JSON use ``repr`` (round-trip exact); SVG coordinates are
fixed to 9 significant digits, so repeated runs give byte-identical files.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

SVG_SCALE = 100.0  # px per unit length in the half-plane and disk
HEX_EDGE_PX = 10.0


def _num(v: float) -> str:
    return f"{float(v):.9g}"


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(obj, indent=2, allow_nan=False) + "\n")
    return path


def trace_rows(times, points):
    for t, z in zip(times, points):
        yield float(t), float(z.real), float(z.imag)


def write_trace_csv(path, trace) -> Path:
    return write_csv(path, ["t", "re", "im"], trace_rows(trace.times, trace.points))


def write_points_csv(path, points, extra: dict | None = None) -> Path:
    pts = np.asarray(points, dtype=complex)
    extra = extra or {}
    header = ["x", "y"] + list(extra)
    cols = [np.asarray(v) for v in extra.values()]
    rows = ([float(z.real), float(z.imag)] + [c[k].item() for c in cols]
            for k, z in enumerate(pts))
    return write_csv(path, header, rows)


def write_coloring_csv(path, coloring) -> Path:
    rows = []
    W, H = coloring.width, coloring.height
    for r in range(-1, H + 1):
        for q in range(-1, W + 1):
            c = coloring.get(q, r)
            if c >= 0:
                rows.append((q, r, c))
    return write_csv(path, ["q", "r", "color"], rows)


def write_tree_csv(path, tree, coords=None) -> Path:
    rows = []
    for v, p in enumerate(tree.parent):
        row = [v, int(p)]
        if coords is not None:
            row += [float(coords[v].real), float(coords[v].imag)]
        rows.append(row)
    header = ["vertex", "parent"] + (["x", "y"] if coords is not None else [])
    return write_csv(path, header, rows)


def write_reports(path_json, path_csv, records: list[dict], meta: dict | None = None):
    doc = {"meta": dict(meta or {}), "reports": records}
    write_json(path_json, doc)
    fields = ["name", "exact", "mean", "std_err", "n", "z", "allowance", "pass", "seed",
              "runtime_s"]
    write_csv(path_csv, fields, ([r[f] if r[f] is not None else "" for f in fields]
                                 for r in records))


# ---------------------------------------------------------------------------
# SVG


class Svg:
    """Minimal SVG builder; user coordinates are mapped by ``scale`` with y
    pointing up."""

    def __init__(self, xmin, xmax, ymin, ymax, scale=SVG_SCALE, margin=10.0):
        self.xmin, self.ymax, self.scale, self.margin = xmin, ymax, scale, margin
        self.width = (xmax - xmin) * scale + 2 * margin
        self.height = (ymax - ymin) * scale + 2 * margin
        self.items: list[str] = []

    def px(self, z: complex) -> tuple[str, str]:
        x = (z.real - self.xmin) * self.scale + self.margin
        y = (self.ymax - z.imag) * self.scale + self.margin
        return _num(x), _num(y)

    def polyline(self, points, stroke="black", width=1.0):
        pts = " ".join(",".join(self.px(complex(z))) for z in points)
        self.items.append(f'<polyline points="{pts}" fill="none" stroke="{stroke}" '
                          f'stroke-width="{_num(width)}"/>')

    def line(self, a, b, stroke="gray", width=0.5):
        (x1, y1), (x2, y2) = self.px(a), self.px(b)
        self.items.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{stroke}" '
                          f'stroke-width="{_num(width)}"/>')

    def polygon(self, points, fill, stroke="none"):
        pts = " ".join(",".join(self.px(complex(z))) for z in points)
        self.items.append(f'<polygon points="{pts}" fill="{fill}" stroke="{stroke}"/>')

    def circle(self, c, r_px, fill="red"):
        x, y = self.px(c)
        self.items.append(f'<circle cx="{x}" cy="{y}" r="{_num(r_px)}" fill="{fill}"/>')

    def text(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(self.width)}" '
                f'height="{_num(self.height)}" viewBox="0 0 {_num(self.width)} '
                f'{_num(self.height)}">')
        return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>'] + self.items
                         + ["</svg>"]) + "\n"

    def save(self, path) -> Path:
        path = Path(path)
        path.write_text(self.text())
        return path


def _bounds(points, pad=0.05):
    pts = np.asarray(points, dtype=complex)
    xmin, xmax = float(pts.real.min()), float(pts.real.max())
    ymin, ymax = float(pts.imag.min()), float(pts.imag.max())
    span = max(xmax - xmin, ymax - ymin, 1e-9)
    return xmin - pad * span, xmax + pad * span, ymin - pad * span, ymax + pad * span


def trace_svg(trace, path, radial: bool = False) -> Path:
    """Half-plane trace with the real axis, or radial trace in the unit disk."""
    pts = np.asarray(trace.points, dtype=complex)
    if radial:
        svg = Svg(-1.05, 1.05, -1.05, 1.05)
        circle = np.exp(2j * math.pi * np.linspace(0, 1, 361))
        svg.polyline(circle, stroke="gray", width=0.5)
    else:
        xmin, xmax, _, ymax = _bounds(pts)
        svg = Svg(xmin, xmax, 0.0, max(ymax, 1e-3))
        svg.line(complex(xmin, 0), complex(xmax, 0))
    svg.polyline(pts, stroke="black", width=1.0)
    return svg.save(path)


def _hexagon(center: complex, size: float):
    return [center + size * np.exp(1j * (math.pi / 6 + k * math.pi / 3)) for k in range(6)]


def hex_svg(coloring, path_obj, out) -> Path:
    """Hexagon tiling (10 px edges) with the exploration path on top."""
    from .discrete.hexlattice import BLUE, YELLOW, hex_center

    size = 1.0 / math.sqrt(3.0)  # hexagon edge for unit centre spacing
    scale = HEX_EDGE_PX / size
    cells = []
    W, H = coloring.width, coloring.height
    for r in range(-1, H + 1):
        for q in range(-1, W + 1):
            c = coloring.get(q, r)
            if c >= 0 or coloring.inside(q, r):
                cells.append((hex_center(q, r), c))
    centers = np.array([c for c, _ in cells])
    xmin, xmax = centers.real.min() - 1, centers.real.max() + 1
    ymin, ymax = centers.imag.min() - 1, centers.imag.max() + 1
    svg = Svg(xmin, xmax, ymin, ymax, scale=scale)
    fills = {BLUE: "#4a78c2", YELLOW: "#f2d04b"}
    for z, c in cells:
        svg.polygon(_hexagon(z, size), fills.get(c, "#dddddd"), stroke="white")
    if len(path_obj.vertices):
        svg.polyline(path_obj.vertices, stroke="black", width=2.0)
    return svg.save(out)


def tree_svg(segments, out, curve=None) -> Path:
    """Tree edges given as (a, b) point pairs, optionally with a Peano curve."""
    pts = [z for seg in segments for z in seg]
    if curve is not None:
        pts += list(curve)
    xmin, xmax, ymin, ymax = _bounds(pts)
    span = max(xmax - xmin, ymax - ymin)
    svg = Svg(xmin, xmax, ymin, ymax, scale=min(SVG_SCALE, 800.0 / max(span, 1e-9)))
    for a, b in segments:
        svg.line(a, b, stroke="#2a6f2a", width=2.0)
    if curve is not None:
        svg.polyline(curve, stroke="#b03030", width=1.0)
    return svg.save(out)


def path_svg(points, out) -> Path:
    pts = np.asarray(points, dtype=complex)
    xmin, xmax, ymin, ymax = _bounds(pts)
    span = max(xmax - xmin, ymax - ymin)
    svg = Svg(xmin, xmax, ymin, ymax, scale=min(SVG_SCALE, 800.0 / max(span, 1e-9)))
    svg.polyline(pts)
    return svg.save(out)
