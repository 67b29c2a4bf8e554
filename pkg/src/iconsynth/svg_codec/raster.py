"""Deterministic scanline rasterization of quantized icons.

Cubics are flattened adaptively to a 0.25-pixel chord tolerance; every
subpath is closed implicitly and filled with the non-zero winding rule;
paths paint black over a white canvas. The per-scanline winding loop is
the hot kernel: a compiled extension is used when available, with a
numpy fallback selected at import time.
"""

from __future__ import annotations

import numpy as np

from ..geometry import CUBIC, GRID, Icon, MOVE, RasterImage, SvgPath

try:
    from . import _scanline as _default_kernel
except ImportError:  # extension not built; the numpy path is exact too
    from . import _scanline_py as _default_kernel

from . import _scanline_py

FLATTEN_TOL = 0.25  # max chord deviation, in pixels
_MAX_DEPTH = 24


def backend_name() -> str:
    return _default_kernel.NAME


def available_backends() -> dict:
    backends = {_scanline_py.NAME: _scanline_py}
    backends[_default_kernel.NAME] = _default_kernel
    return backends


def _flat_enough(p0, p1, p2, p3, tol) -> bool:
    # distance of both control points from the chord p0-p3
    dx, dy = p3[0] - p0[0], p3[1] - p0[1]
    norm = (dx * dx + dy * dy) ** 0.5
    if norm < 1e-12:
        d1 = ((p1[0] - p0[0]) ** 2 + (p1[1] - p0[1]) ** 2) ** 0.5
        d2 = ((p2[0] - p0[0]) ** 2 + (p2[1] - p0[1]) ** 2) ** 0.5
        return max(d1, d2) <= tol
    d1 = abs((p1[0] - p0[0]) * dy - (p1[1] - p0[1]) * dx) / norm
    d2 = abs((p2[0] - p0[0]) * dy - (p2[1] - p0[1]) * dx) / norm
    return max(d1, d2) <= tol


def flatten_cubic(p0, p1, p2, p3, tol: float = FLATTEN_TOL) -> list:
    """Polyline approximation (excluding p0) via de Casteljau subdivision."""
    out = []

    def rec(a, b, c, d, depth):
        if depth >= _MAX_DEPTH or _flat_enough(a, b, c, d, tol):
            out.append(d)
            return
        ab = ((a[0] + b[0]) / 2, (a[1] + b[1]) / 2)
        bc = ((b[0] + c[0]) / 2, (b[1] + c[1]) / 2)
        cd = ((c[0] + d[0]) / 2, (c[1] + d[1]) / 2)
        abc = ((ab[0] + bc[0]) / 2, (ab[1] + bc[1]) / 2)
        bcd = ((bc[0] + cd[0]) / 2, (bc[1] + cd[1]) / 2)
        mid = ((abc[0] + bcd[0]) / 2, (abc[1] + bcd[1]) / 2)
        rec(a, ab, abc, mid, depth + 1)
        rec(mid, bcd, cd, d, depth + 1)

    rec(tuple(p0), tuple(p1), tuple(p2), tuple(p3), 0)
    return out


def path_to_edges(path: SvgPath, scale: float, tol: float = FLATTEN_TOL) -> tuple:
    """Flatten one path (all subpaths, implicitly closed) to edge arrays."""
    xs0, ys0, xs1, ys1 = [], [], [], []

    def emit(a, b):
        if a != b:
            xs0.append(a[0])
            ys0.append(a[1])
            xs1.append(b[0])
            ys1.append(b[1])

    cur = None
    start = None
    for cmd in path:
        if cmd.kind == MOVE:
            if cur is not None and start is not None:
                emit(cur, start)  # close previous subpath
            cur = (cmd.end.x * scale, cmd.end.y * scale)
            start = cur
        elif cmd.kind == CUBIC:
            pts = [(p.x * scale, p.y * scale) for p in cmd.points]
            for nxt in flatten_cubic(cur, pts[0], pts[1], pts[2], tol):
                emit(cur, nxt)
                cur = nxt
        else:  # LINE
            nxt = (cmd.end.x * scale, cmd.end.y * scale)
            emit(cur, nxt)
            cur = nxt
    if cur is not None and start is not None:
        emit(cur, start)
    return (
        np.asarray(xs0, dtype=np.float64),
        np.asarray(ys0, dtype=np.float64),
        np.asarray(xs1, dtype=np.float64),
        np.asarray(ys1, dtype=np.float64),
    )


def rasterize(icon: Icon, resolution: int, kernel=None) -> RasterImage:
    """Render black shapes on a white canvas at the given resolution."""
    if resolution < 8:
        raise ValueError(f"resolution must be >= 8, got {resolution}")
    kern = kernel if kernel is not None else _default_kernel
    scale = resolution / float(GRID)
    pixels = np.ones((resolution, resolution), dtype=np.float32)
    for path in icon:
        x0, y0, x1, y1 = path_to_edges(path, scale)
        inside = kern.fill_mask(x0, y0, x1, y1, resolution)
        pixels[inside.astype(bool)] = 0.0
    return RasterImage(resolution=resolution, pixels=pixels)
