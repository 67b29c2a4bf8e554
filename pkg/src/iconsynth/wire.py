"""Command-list JSON: the structured icon format used on the wire.

An icon is a list of paths; each path a list of commands:
    {"kind": "M"|"L"|"C", "pts": [[x, y], ...]}
with 1 point for M/L and 3 (control1, control2, end) for C.
"""

from __future__ import annotations

from .geometry import Command, Icon, Point, SvgPath


class WireError(ValueError):
    pass


def path_to_json(path: SvgPath) -> list:
    return [
        {"kind": c.kind, "pts": [[int(p.x), int(p.y)] for p in c.points]} for c in path
    ]


def icon_to_json(icon: Icon) -> list:
    return [path_to_json(p) for p in icon]


def path_from_json(data) -> SvgPath:
    if not isinstance(data, list) or not data:
        raise WireError("path must be a non-empty list of commands")
    cmds = []
    for i, entry in enumerate(data):
        if not isinstance(entry, dict) or "kind" not in entry or "pts" not in entry:
            raise WireError(f"command {i} must be an object with 'kind' and 'pts'")
        kind = entry["kind"]
        pts = entry["pts"]
        if not isinstance(pts, list):
            raise WireError(f"command {i}: pts must be a list")
        try:
            points = tuple(Point(int(x), int(y)) for x, y in pts)
        except (TypeError, ValueError) as exc:
            raise WireError(f"command {i}: malformed point list") from exc
        for p in points:
            if not (0 <= p.x < 100 and 0 <= p.y < 100):
                raise WireError(f"command {i}: point {tuple(p)} outside the 100x100 grid")
        try:
            cmds.append(Command(kind, points))
        except ValueError as exc:
            raise WireError(f"command {i}: {exc}") from exc
    try:
        return SvgPath(tuple(cmds))
    except ValueError as exc:
        raise WireError(str(exc)) from exc


def icon_from_json(data) -> Icon:
    if not isinstance(data, list) or not data:
        raise WireError("icon must be a non-empty list of paths")
    return Icon(tuple(path_from_json(p) for p in data))
