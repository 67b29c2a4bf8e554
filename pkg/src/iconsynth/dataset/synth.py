"""Procedural desk-scale icon corpus.

Each family is a parameterized generator producing quantized icons with
matching keyword labels and a short phrase. Everything is drawn with
integer coordinates directly on the grid, so every record round-trips
through the tokenizer exactly.
"""

from __future__ import annotations

import numpy as np

from ..geometry import GRID, Icon, SvgPath, cubic_to, line_to, move_to
from .ingest import Record

_K = 0.5522847498


def _circle_cmds(cx: int, cy: int, r: int) -> list:
    k = max(1, round(_K * r))
    return [
        move_to(cx + r, cy),
        cubic_to(cx + r, cy + k, cx + k, cy + r, cx, cy + r),
        cubic_to(cx - k, cy + r, cx - r, cy + k, cx - r, cy),
        cubic_to(cx - r, cy - k, cx - k, cy - r, cx, cy - r),
        cubic_to(cx + k, cy - r, cx + r, cy - k, cx + r, cy),
    ]


def _rect_cmds(x0: int, y0: int, x1: int, y1: int) -> list:
    return [
        move_to(x0, y0),
        line_to(x1, y0),
        line_to(x1, y1),
        line_to(x0, y1),
        line_to(x0, y0),
    ]


def _bounds(rng, lo=6, hi=44):
    """Random center and radius keeping the shape inside the grid."""
    r = int(rng.integers(lo, hi + 1))
    cx = int(rng.integers(r + 2, GRID - r - 2))
    cy = int(rng.integers(r + 2, GRID - r - 2))
    return cx, cy, r


def _square(rng):
    cx, cy, r = _bounds(rng, 10, 40)
    return [_rect_cmds(cx - r, cy - r, cx + r, cy + r)], ["square", "box"]


def _circle(rng):
    cx, cy, r = _bounds(rng, 10, 40)
    return [_circle_cmds(cx, cy, r)], ["circle", "round"]


def _triangle(rng):
    cx, cy, r = _bounds(rng, 12, 40)
    cmds = [
        move_to(cx, cy - r),
        line_to(cx + r, cy + r),
        line_to(cx - r, cy + r),
        line_to(cx, cy - r),
    ]
    return [cmds], ["triangle", "peak"]


def _arrow(rng):
    cx, cy, r = _bounds(rng, 14, 40)
    w = max(3, r // 3)
    cmds = [
        move_to(cx - r, cy - w),
        line_to(cx, cy - w),
        line_to(cx, cy - 2 * w),
        line_to(cx + r, cy),
        line_to(cx, cy + 2 * w),
        line_to(cx, cy + w),
        line_to(cx - r, cy + w),
        line_to(cx - r, cy - w),
    ]
    return [cmds], ["arrow", "direction"]


def _plus(rng):
    cx, cy, r = _bounds(rng, 14, 40)
    w = max(3, r // 3)
    cmds = [
        move_to(cx - w, cy - r),
        line_to(cx + w, cy - r),
        line_to(cx + w, cy - w),
        line_to(cx + r, cy - w),
        line_to(cx + r, cy + w),
        line_to(cx + w, cy + w),
        line_to(cx + w, cy + r),
        line_to(cx - w, cy + r),
        line_to(cx - w, cy + w),
        line_to(cx - r, cy + w),
        line_to(cx - r, cy - w),
        line_to(cx - w, cy - w),
        line_to(cx - w, cy - r),
    ]
    return [cmds], ["plus", "cross"]


def _ring(rng):
    cx, cy, r = _bounds(rng, 16, 40)
    inner = max(5, r - max(4, r // 3))
    return [_circle_cmds(cx, cy, r), _circle_cmds(cx, cy, inner)], ["ring", "circle", "hollow"]


def _house(rng):
    cx, cy, r = _bounds(rng, 16, 38)
    roof = [
        move_to(cx - r, cy),
        line_to(cx, cy - r),
        line_to(cx + r, cy),
        line_to(cx - r, cy),
    ]
    body = _rect_cmds(cx - r + max(2, r // 4), cy, cx + r - max(2, r // 4), cy + r)
    return [body, roof], ["house", "home"]


def _window(rng):
    cx, cy, r = _bounds(rng, 16, 40)
    w = max(2, r // 6)
    frame = _rect_cmds(cx - r, cy - r, cx + r, cy + r)
    hbar = _rect_cmds(cx - r, cy - w, cx + r, cy + w)
    vbar = _rect_cmds(cx - w, cy - r, cx + w, cy + r)
    return [frame, hbar, vbar], ["window", "frame", "square"]


def _target(rng):
    cx, cy, r = _bounds(rng, 20, 40)
    r2 = max(8, (2 * r) // 3)
    r3 = max(4, r // 3)
    return (
        [_circle_cmds(cx, cy, r), _circle_cmds(cx, cy, r2), _circle_cmds(cx, cy, r3)],
        ["target", "ring", "round"],
    )


def _letter_h(rng):
    cx, cy, r = _bounds(rng, 16, 38)
    w = max(3, r // 4)
    left = _rect_cmds(cx - r, cy - r, cx - r + 2 * w, cy + r)
    right = _rect_cmds(cx + r - 2 * w, cy - r, cx + r, cy + r)
    mid = _rect_cmds(cx - r + 2 * w, cy - w, cx + r - 2 * w, cy + w)
    return [left, right, mid], ["letter", "glyph", "h"]


def _letter_t(rng):
    cx, cy, r = _bounds(rng, 16, 38)
    w = max(3, r // 4)
    top = _rect_cmds(cx - r, cy - r, cx + r, cy - r + 2 * w)
    stem = _rect_cmds(cx - w, cy - r + 2 * w, cx + w, cy + r)
    return [top, stem], ["letter", "glyph", "t"]


FAMILIES = {
    "square": _square,
    "circle": _circle,
    "triangle": _triangle,
    "arrow": _arrow,
    "plus": _plus,
    "ring": _ring,
    "house": _house,
    "window": _window,
    "target": _target,
    "letter_h": _letter_h,
    "letter_t": _letter_t,
}

_PHRASE_STYLES = ("a simple {} icon", "an icon showing a {}", "a small {} symbol")


def synth_record(family: str, rng: np.random.Generator, index: int = 0) -> Record:
    paths, keywords = FAMILIES[family](rng)
    icon = Icon(tuple(SvgPath(tuple(c)) for c in paths))
    phrase = _PHRASE_STYLES[int(rng.integers(len(_PHRASE_STYLES)))].format(keywords[0])
    return Record(
        icon=icon, keywords=tuple(keywords), phrase=phrase, name=f"synth_{family}_{index:05d}"
    )


def synth_corpus(
    n: int, rng: np.random.Generator, families: list[str] | None = None
) -> list[Record]:
    """n labeled icons drawn round-robin from the requested families."""
    if n < 1:
        raise ValueError("n must be >= 1")
    names = list(families) if families else list(FAMILIES)
    unknown = [f for f in names if f not in FAMILIES]
    if unknown:
        raise ValueError(f"unknown families: {unknown}")
    return [synth_record(names[i % len(names)], rng, i) for i in range(n)]
