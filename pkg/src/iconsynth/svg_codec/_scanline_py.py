"""Pure-numpy scanline fill kernel (fallback for the compiled one).

Both backends implement the same contract and must agree bit-exactly:
given edge endpoint arrays in pixel coordinates, return a uint8 mask of
pixels whose centers are inside by the non-zero winding rule.
"""

from __future__ import annotations

import numpy as np

NAME = "python"


def fill_mask(x0, y0, x1, y1, resolution: int) -> np.ndarray:
    """Non-zero-winding inside test at every pixel center.

    Edges are half-open in y ([ymin, ymax)) so shared vertices are not
    double counted; horizontal edges never cross a scanline.
    """
    mask = np.zeros((resolution, resolution), dtype=np.uint8)
    if len(x0) == 0:
        return mask
    centers = np.arange(resolution, dtype=np.float64) + 0.5
    dy = y1 - y0
    for row in range(resolution):
        py = row + 0.5
        down = (y0 <= py) & (py < y1)
        up = (y1 <= py) & (py < y0)
        crossing = down | up
        if not crossing.any():
            continue
        t = (py - y0[crossing]) / dy[crossing]
        xs = x0[crossing] + t * (x1[crossing] - x0[crossing])
        sign = np.where(down[crossing], 1, -1)
        # winding(px) = sum of signs over crossings with xs > px
        winding = (sign[None, :] * (xs[None, :] > centers[:, None])).sum(axis=1)
        mask[row] = winding != 0
    return mask
