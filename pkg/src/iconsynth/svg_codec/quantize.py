"""Uniform bbox-to-grid normalization with integer quantization.

The icon's bounding box (over all command points, control points
included) is scaled uniformly into [0, 99]^2, centered on the shorter
axis, rounded half-up to integers, and clamped. Rounding the combined
scale+offset in one step makes the operation idempotent on its own
outputs, including the half-integer centering ties.
"""

from __future__ import annotations

import math

from ..geometry import GRID, Command, Icon, Point, SvgPath

_TARGET = GRID - 1  # 99


def _round_half_up(v: float) -> int:
    return math.floor(v + 0.5)


def normalize_and_quantize(icon: Icon) -> Icon:
    pts = list(icon.all_points())
    xmin = min(p.x for p in pts)
    xmax = max(p.x for p in pts)
    ymin = min(p.y for p in pts)
    ymax = max(p.y for p in pts)
    w, h = xmax - xmin, ymax - ymin
    extent = max(w, h)
    s = _TARGET / extent if extent > 0 else 0.0
    ox = (_TARGET - w * s) / 2.0
    oy = (_TARGET - h * s) / 2.0

    def q(c: float, cmin: float, off: float) -> int:
        v = _round_half_up((c - cmin) * s + off)
        return min(max(v, 0), _TARGET)

    def qp(p: Point) -> Point:
        return Point(q(p.x, xmin, ox), q(p.y, ymin, oy))

    return Icon(
        tuple(
            SvgPath(tuple(Command(c.kind, tuple(qp(p) for p in c.points)) for c in path))
            for path in icon
        ),
        width=GRID,
        height=GRID,
    )
