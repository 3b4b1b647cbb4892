"""Deterministic SVG drawings of point sets on the angle torus."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .perturb import graph_polyline, slice_path_vertices
from .pillowcase import TWO_PI

__all__ = ["RenderOptions", "render_pillowcase"]

_TICKS = ["0", "π/2", "π", "3π/2", "2π"]


@dataclass(frozen=True)
class RenderOptions:
    width: int = 600
    height: int = 600
    radius: float = 1.6
    margin: int = 50


def _f(x):
    return f"{x:.4f}"


class _Canvas:
    def __init__(self, opts):
        self.o = opts
        self.sx = (opts.width - 2 * opts.margin) / TWO_PI
        self.sy = (opts.height - 2 * opts.margin) / TWO_PI

    def xy(self, theta, eta):
        return self.o.margin + theta * self.sx, self.o.height - self.o.margin - eta * self.sy


def _torus_copies(vertices):
    """Translates of a plane polyline that can meet [0, 2pi]^2."""
    out = []
    for i in (-1, 0, 1):
        for j in (-1, 0, 1):
            v = vertices + np.array([i * TWO_PI, j * TWO_PI])
            if v[:, 0].max() < 0 or v[:, 0].min() > TWO_PI or v[:, 1].max() < 0 or v[:, 1].min() > TWO_PI:
                continue
            out.append(v)
    return out


def _polyline(canvas, vertices, attrs):
    pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in (canvas.xy(a, b) for a, b in vertices))
    return f'<polyline points="{pts}" {attrs}/>'


def _points(canvas, coords, radius, css):
    out = []
    for t, e in coords:
        x, y = canvas.xy(float(t), float(e))
        out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(radius)}" class="{css}"/>')
    return out


def render_pillowcase(s, second=None, shear=None, path=None, options=None, title=""):
    """SVG text for a point set with optional overlays.

    ``second`` is another point set drawn in a contrasting style. ``shear`` is a
    ShearFn whose graph eta = g(theta) is drawn; ``path`` is a dict with keys
    ``level`` and ``half_width`` describing the slice path and its corridor.
    """
    opts = options or RenderOptions()
    cv = _Canvas(opts)
    x0, y0 = cv.xy(0, TWO_PI)
    x1, y1 = cv.xy(TWO_PI, 0)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{opts.width}" height="{opts.height}" '
        f'viewBox="0 0 {opts.width} {opts.height}">',
        "<style>.grid{stroke:#bbb;stroke-width:0.6}.frame{fill:none;stroke:#222;stroke-width:1}"
        ".p1{fill:#1f4e99}.p2{fill:#c0392b}.lbl{font:12px sans-serif;fill:#222}"
        ".graph{fill:none;stroke:#2e8b57;stroke-width:1.4}.path{fill:none;stroke:#555;stroke-width:1;stroke-dasharray:4 3}"
        ".band{fill:none;stroke:#f1c40f;stroke-opacity:0.35;stroke-linecap:square;stroke-linejoin:miter}</style>",
        f'<defs><clipPath id="torus"><rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" height="{_f(y1 - y0)}"/></clipPath></defs>',
    ]
    if title:
        lines.append(f'<text x="{_f(opts.width / 2)}" y="20" text-anchor="middle" class="lbl">{title}</text>')
    for k in range(5):
        v = k * math.pi / 2
        ax, ay = cv.xy(v, 0)
        bx, by = cv.xy(v, TWO_PI)
        lines.append(f'<line x1="{_f(ax)}" y1="{_f(ay)}" x2="{_f(bx)}" y2="{_f(by)}" class="grid"/>')
        ax, ay = cv.xy(0, v)
        bx, by = cv.xy(TWO_PI, v)
        lines.append(f'<line x1="{_f(ax)}" y1="{_f(ay)}" x2="{_f(bx)}" y2="{_f(by)}" class="grid"/>')
        tx, ty = cv.xy(v, 0)
        lines.append(f'<text x="{_f(tx)}" y="{_f(ty + 18)}" text-anchor="middle" class="lbl">{_TICKS[k]}</text>')
        tx, ty = cv.xy(0, v)
        lines.append(f'<text x="{_f(tx - 8)}" y="{_f(ty + 4)}" text-anchor="end" class="lbl">{_TICKS[k]}</text>')
    lines.append(f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(x1 - x0)}" height="{_f(y1 - y0)}" class="frame"/>')
    ax, ay = cv.xy(math.pi, 0)
    lines.append(f'<text x="{_f(ax)}" y="{_f(ay + 36)}" text-anchor="middle" class="lbl">θ</text>')
    ax, ay = cv.xy(0, math.pi)
    lines.append(f'<text x="{_f(ax - 36)}" y="{_f(ay)}" class="lbl">η</text>')
    lines.append('<g clip-path="url(#torus)">')
    if path is not None:
        verts = slice_path_vertices(path["level"])
        hw = float(path["half_width"])
        for v in _torus_copies(verts):
            lines.append(_polyline(cv, v, f'class="band" stroke-width="{_f(2 * hw * cv.sx)}" '
                                           f'data-half-width="{hw:.17g}"'))
            lines.append(_polyline(cv, v, 'class="path"'))
    if shear is not None:
        for v in _torus_copies(graph_polyline(shear)):
            lines.append(_polyline(cv, v, 'class="graph"'))
    lines.append("</g>")
    if s is not None:
        lines.extend(_points(cv, s.coords() if hasattr(s, "coords") else s, opts.radius, "p1"))
    if second is not None:
        lines.extend(_points(cv, second.coords() if hasattr(second, "coords") else second, opts.radius, "p2"))
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
