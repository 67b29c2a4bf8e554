"""Canonical SVG emission: integer absolute M/L/C, fixed whitespace.

The canonical form is stable enough that string equality works as a
test oracle; parse_svg(serialize_svg(icon)) == icon for every valid
quantized icon.
"""

from __future__ import annotations

from ..geometry import GRID, Icon
from .errors import CodecError

XMLNS = "http://www.w3.org/2000/svg"


def path_d(path) -> str:
    parts = []
    for cmd in path:
        parts.append(cmd.kind)
        for p in cmd.points:
            parts.append(str(int(p.x)))
            parts.append(str(int(p.y)))
    return " ".join(parts)


def serialize_svg(icon: Icon, include_xmlns: bool = False) -> str:
    """Emit the canonical document. include_xmlns only adds the namespace
    declaration (for standalone viewing); the canonical form omits it."""
    if not icon.is_quantized():
        raise CodecError("serialize_svg requires a quantized icon")
    ns = f' xmlns="{XMLNS}"' if include_xmlns else ""
    body = "".join(
        f'<path d="{path_d(path)}" fill="black"/>' for path in icon
    )
    return f'<svg{ns} viewBox="0 0 {GRID} {GRID}">{body}</svg>'
