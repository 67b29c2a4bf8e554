"""Core geometric value types shared by the whole pipeline.

An icon is an ordered list of paths; a path is an ordered list of drawing
commands restricted to MoveTo / LineTo / CubicBezier; every coordinate
lives on (or, before quantization, around) a fixed 100x100 grid.
All types are immutable and safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Sequence

import numpy as np

GRID = 100

# command kinds
MOVE = "M"
LINE = "L"
CUBIC = "C"

_ARITY = {MOVE: 1, LINE: 1, CUBIC: 3}


class Point(NamedTuple):
    """A 2D point. Quantized icons hold integers in [0, GRID)."""

    x: float
    y: float


@dataclass(frozen=True)
class Command:
    """One drawing command: kind plus its points in argument order.

    CubicBezier points are (control1, control2, endpoint); MoveTo and
    LineTo carry a single endpoint. Arity is enforced at construction.
    """

    kind: str
    points: tuple[Point, ...]

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown command kind {self.kind!r}")
        if len(self.points) != _ARITY[self.kind]:
            raise ValueError(
                f"command {self.kind} takes {_ARITY[self.kind]} point(s), got {len(self.points)}"
            )

    @property
    def end(self) -> Point:
        return self.points[-1]


def move_to(x, y) -> Command:
    return Command(MOVE, (Point(x, y),))


def line_to(x, y) -> Command:
    return Command(LINE, (Point(x, y),))


def cubic_to(x1, y1, x2, y2, x, y) -> Command:
    return Command(CUBIC, (Point(x1, y1), Point(x2, y2), Point(x, y)))


@dataclass(frozen=True)
class SvgPath:
    """A non-empty command list opening with MoveTo.

    Interior MoveTo commands are allowed and start new subpaths (closed
    implicitly when filling).
    """

    commands: tuple[Command, ...]

    def __post_init__(self):
        if not self.commands:
            raise ValueError("path must contain at least one command")
        if self.commands[0].kind != MOVE:
            raise ValueError("path must start with MoveTo")

    def __len__(self) -> int:
        return len(self.commands)

    def __iter__(self) -> Iterator[Command]:
        return iter(self.commands)


@dataclass(frozen=True)
class Icon:
    """An ordered, non-empty list of paths on the fixed-size viewbox."""

    paths: tuple[SvgPath, ...]
    width: int = GRID
    height: int = GRID

    def __post_init__(self):
        if not self.paths:
            raise ValueError("icon must contain at least one path")

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self) -> Iterator[SvgPath]:
        return iter(self.paths)

    def all_points(self) -> Iterator[Point]:
        for path in self.paths:
            for cmd in path:
                yield from cmd.points

    def is_quantized(self) -> bool:
        """True when every coordinate is an integer inside the viewbox."""
        return all(
            float(p.x).is_integer()
            and float(p.y).is_integer()
            and 0 <= p.x < self.width
            and 0 <= p.y < self.height
            for p in self.all_points()
        )


def icon_from_lists(paths: Sequence[Sequence[Command]]) -> Icon:
    return Icon(tuple(SvgPath(tuple(cmds)) for cmds in paths))


@dataclass(frozen=True)
class RasterImage:
    """Square grayscale raster, row-major, intensities in [0, 1]."""

    resolution: int
    pixels: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.pixels.shape != (self.resolution, self.resolution):
            raise ValueError(
                f"pixel buffer shape {self.pixels.shape} != "
                f"({self.resolution}, {self.resolution})"
            )
        if self.pixels.min() < 0.0 or self.pixels.max() > 1.0:
            raise ValueError("pixel intensities must lie in [0, 1]")
