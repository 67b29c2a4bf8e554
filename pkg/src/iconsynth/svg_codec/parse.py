"""SVG subset parser: everything becomes absolute MoveTo/LineTo/CubicBezier.

Supported elements: path, rect, circle, ellipse, line, polyline, polygon,
plus g/svg containers whose transforms are flattened onto their children.
title/desc/metadata are skipped (they carry no geometry); anything else
raises UnsupportedFeatureError naming the element.

Conversions:
  H/V            -> LineTo
  Q/q            -> cubic by exact degree elevation (1/3-2/3 control points)
  A/a            -> cubic arcs, subdivided so each segment spans <= 90 degrees
  Z/z            -> LineTo back to the subpath start
  rect           -> MoveTo + 4 LineTo
  circle/ellipse -> MoveTo + 4 CubicBezier (kappa = 0.5522847498)
  transform      -> applied to every point, then discarded

Smooth shorthands (S/s, T/t) are outside the subset and rejected.
Style and paint attributes are discarded.
"""

from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET

from ..geometry import CUBIC, Command, Icon, Point, SvgPath, cubic_to, line_to, move_to
from .errors import SvgParseError, UnsupportedFeatureError

KAPPA = 0.5522847498

_SUPPORTED_SHAPES = {"path", "rect", "circle", "ellipse", "line", "polyline", "polygon"}
_CONTAINERS = {"svg", "g"}
_IGNORED = {"title", "desc", "metadata"}

_NUMBER = re.compile(r"[-+]?(?:\d*\.\d+|\d+\.?)(?:[eE][-+]?\d+)?")
_WSP_COMMA = re.compile(r"[\s,]*")
_TRANSFORM_FN = re.compile(r"(matrix|translate|scale|rotate|skewX|skewY)\s*\(([^)]*)\)")


# --- affine transforms: (a, b, c, d, e, f) with x' = a*x + c*y + e ---

IDENTITY = (1.0, 0.0, 0.0, 1.0, 0.0, 0.0)


def _compose(m1, m2):
    """m1 applied after m2 (i.e. parent @ child in matrix terms)."""
    a1, b1, c1, d1, e1, f1 = m1
    a2, b2, c2, d2, e2, f2 = m2
    return (
        a1 * a2 + c1 * b2,
        b1 * a2 + d1 * b2,
        a1 * c2 + c1 * d2,
        b1 * c2 + d1 * d2,
        a1 * e2 + c1 * f2 + e1,
        b1 * e2 + d1 * f2 + f1,
    )


def _apply(m, p: Point) -> Point:
    a, b, c, d, e, f = m
    return Point(a * p.x + c * p.y + e, b * p.x + d * p.y + f)


def parse_transform(text: str):
    """Parse a transform attribute into a single affine matrix."""
    matrix = IDENTITY
    pos = 0
    for match in _TRANSFORM_FN.finditer(text):
        between = text[pos : match.start()].strip(" \t\n\r,")
        if between:
            raise SvgParseError(f"unparseable transform fragment {between!r}")
        pos = match.end()
        name = match.group(1)
        args = [float(v) for v in _NUMBER.findall(match.group(2))]
        if name == "matrix":
            if len(args) != 6:
                raise SvgParseError("matrix() takes 6 numbers")
            m = tuple(args)
        elif name == "translate":
            if len(args) not in (1, 2):
                raise SvgParseError("translate() takes 1 or 2 numbers")
            tx = args[0]
            ty = args[1] if len(args) == 2 else 0.0
            m = (1.0, 0.0, 0.0, 1.0, tx, ty)
        elif name == "scale":
            if len(args) not in (1, 2):
                raise SvgParseError("scale() takes 1 or 2 numbers")
            sx = args[0]
            sy = args[1] if len(args) == 2 else sx
            m = (sx, 0.0, 0.0, sy, 0.0, 0.0)
        elif name == "rotate":
            if len(args) not in (1, 3):
                raise SvgParseError("rotate() takes 1 or 3 numbers")
            ang = math.radians(args[0])
            cos, sin = math.cos(ang), math.sin(ang)
            m = (cos, sin, -sin, cos, 0.0, 0.0)
            if len(args) == 3:
                cx, cy = args[1], args[2]
                m = _compose(
                    (1.0, 0.0, 0.0, 1.0, cx, cy),
                    _compose(m, (1.0, 0.0, 0.0, 1.0, -cx, -cy)),
                )
        elif name == "skewX":
            m = (1.0, 0.0, math.tan(math.radians(args[0])), 1.0, 0.0, 0.0)
        else:  # skewY
            m = (1.0, math.tan(math.radians(args[0])), 0.0, 1.0, 0.0, 0.0)
        matrix = _compose(matrix, m)
    tail = text[pos:].strip(" \t\n\r,")
    if tail:
        raise SvgParseError(f"unparseable transform fragment {tail!r}")
    return matrix


# --- path data scanner ---


class _Scanner:
    """Cursor over a path d-attribute; handles compact arc-flag syntax."""

    def __init__(self, d: str):
        self.d = d
        self.pos = 0

    def _skip(self):
        self.pos = _WSP_COMMA.match(self.d, self.pos).end()

    def at_end(self) -> bool:
        self._skip()
        return self.pos >= len(self.d)

    def command(self) -> str | None:
        self._skip()
        if self.pos < len(self.d) and self.d[self.pos].isalpha():
            ch = self.d[self.pos]
            self.pos += 1
            return ch
        return None

    def number(self) -> float:
        self._skip()
        m = _NUMBER.match(self.d, self.pos)
        if not m or m.group() in ("", "+", "-", "."):
            raise SvgParseError(f"expected number in path data at offset {self.pos}")
        self.pos = m.end()
        return float(m.group())

    def flag(self) -> bool:
        self._skip()
        if self.pos < len(self.d) and self.d[self.pos] in "01":
            v = self.d[self.pos] == "1"
            self.pos += 1
            return v
        raise SvgParseError(f"expected arc flag (0 or 1) at offset {self.pos}")

    def more_numbers(self) -> bool:
        self._skip()
        return self.pos < len(self.d) and (
            self.d[self.pos].isdigit() or self.d[self.pos] in "+-."
        )


def _arc_to_cubics(p0: Point, rx, ry, rot_deg, large, sweep, p1: Point):
    """Endpoint-parameterized elliptical arc as <=90-degree cubic segments."""
    if p0 == p1:
        return []
    if rx == 0 or ry == 0:
        return [line_to(p1.x, p1.y)]
    rx, ry = abs(rx), abs(ry)
    phi = math.radians(rot_deg)
    cosp, sinp = math.cos(phi), math.sin(phi)
    # midpoint form (SVG spec appendix F.6.5)
    dx2, dy2 = (p0.x - p1.x) / 2.0, (p0.y - p1.y) / 2.0
    x1p = cosp * dx2 + sinp * dy2
    y1p = -sinp * dx2 + cosp * dy2
    lam = (x1p / rx) ** 2 + (y1p / ry) ** 2
    if lam > 1.0:  # radii too small: scale up uniformly
        s = math.sqrt(lam)
        rx *= s
        ry *= s
    num = rx * rx * ry * ry - rx * rx * y1p * y1p - ry * ry * x1p * x1p
    den = rx * rx * y1p * y1p + ry * ry * x1p * x1p
    coef = math.sqrt(max(0.0, num / den)) if den else 0.0
    if large == sweep:
        coef = -coef
    cxp = coef * rx * y1p / ry
    cyp = -coef * ry * x1p / rx
    cx = cosp * cxp - sinp * cyp + (p0.x + p1.x) / 2.0
    cy = sinp * cxp + cosp * cyp + (p0.y + p1.y) / 2.0

    def angle(ux, uy, vx, vy):
        dot = ux * vx + uy * vy
        norm = math.hypot(ux, uy) * math.hypot(vx, vy)
        a = math.acos(max(-1.0, min(1.0, dot / norm)))
        if ux * vy - uy * vx < 0:
            a = -a
        return a

    theta1 = angle(1.0, 0.0, (x1p - cxp) / rx, (y1p - cyp) / ry)
    dtheta = angle(
        (x1p - cxp) / rx, (y1p - cyp) / ry, (-x1p - cxp) / rx, (-y1p - cyp) / ry
    )
    if not sweep and dtheta > 0:
        dtheta -= 2 * math.pi
    elif sweep and dtheta < 0:
        dtheta += 2 * math.pi

    n_seg = max(1, math.ceil(abs(dtheta) / (math.pi / 2)))
    seg = dtheta / n_seg
    # cubic control distance for a unit arc of the given sweep
    alpha = 4.0 / 3.0 * math.tan(seg / 4.0)

    def ellipse_point(theta):
        ex = cx + rx * math.cos(theta) * cosp - ry * math.sin(theta) * sinp
        ey = cy + rx * math.cos(theta) * sinp + ry * math.sin(theta) * cosp
        return ex, ey

    def ellipse_tangent(theta):
        tx = -rx * math.sin(theta) * cosp - ry * math.cos(theta) * sinp
        ty = -rx * math.sin(theta) * sinp + ry * math.cos(theta) * cosp
        return tx, ty

    out = []
    for i in range(n_seg):
        t0 = theta1 + i * seg
        t1 = t0 + seg
        sx, sy = ellipse_point(t0)
        ex, ey = ellipse_point(t1)
        tx0, ty0 = ellipse_tangent(t0)
        tx1, ty1 = ellipse_tangent(t1)
        out.append(
            cubic_to(
                sx + alpha * tx0,
                sy + alpha * ty0,
                ex - alpha * tx1,
                ey - alpha * ty1,
                ex,
                ey,
            )
        )
    # pin the final endpoint to the requested one
    last = out[-1]
    out[-1] = Command(CUBIC, (last.points[0], last.points[1], p1))
    return out


def _parse_path_d(d: str) -> list[Command]:
    sc = _Scanner(d)
    cmds: list[Command] = []
    cur = Point(0.0, 0.0)
    subpath_start = Point(0.0, 0.0)
    letter = None
    while not sc.at_end():
        nxt = sc.command()
        if nxt is not None:
            letter = nxt
        elif letter is None:
            raise SvgParseError("path data must start with a command letter")
        elif letter in "Mm":
            # implicit repetition of MoveTo continues as LineTo
            letter = "L" if letter == "M" else "l"
        if letter is None or letter in "SsTt":
            raise UnsupportedFeatureError(f"path command {letter!r}")
        rel = letter.islower()
        op = letter.upper()
        if op == "Z":
            cmds.append(line_to(subpath_start.x, subpath_start.y))
            cur = subpath_start
            letter = None  # a number may not follow Z without a new command
            continue
        if op == "M":
            x, y = sc.number(), sc.number()
            cur = Point(cur.x + x, cur.y + y) if rel else Point(x, y)
            subpath_start = cur
            cmds.append(move_to(cur.x, cur.y))
        elif op == "L":
            x, y = sc.number(), sc.number()
            cur = Point(cur.x + x, cur.y + y) if rel else Point(x, y)
            cmds.append(line_to(cur.x, cur.y))
        elif op == "H":
            x = sc.number()
            cur = Point(cur.x + x if rel else x, cur.y)
            cmds.append(line_to(cur.x, cur.y))
        elif op == "V":
            y = sc.number()
            cur = Point(cur.x, cur.y + y if rel else y)
            cmds.append(line_to(cur.x, cur.y))
        elif op == "C":
            vals = [sc.number() for _ in range(6)]
            if rel:
                vals = [
                    vals[0] + cur.x, vals[1] + cur.y,
                    vals[2] + cur.x, vals[3] + cur.y,
                    vals[4] + cur.x, vals[5] + cur.y,
                ]
            cmds.append(cubic_to(*vals))
            cur = Point(vals[4], vals[5])
        elif op == "Q":
            vals = [sc.number() for _ in range(4)]
            if rel:
                vals = [vals[0] + cur.x, vals[1] + cur.y, vals[2] + cur.x, vals[3] + cur.y]
            qx, qy, ex, ey = vals
            # exact degree elevation: controls at 1/3 and 2/3 interpolation
            c1 = Point(cur.x + 2.0 / 3.0 * (qx - cur.x), cur.y + 2.0 / 3.0 * (qy - cur.y))
            c2 = Point(ex + 2.0 / 3.0 * (qx - ex), ey + 2.0 / 3.0 * (qy - ey))
            cmds.append(cubic_to(c1.x, c1.y, c2.x, c2.y, ex, ey))
            cur = Point(ex, ey)
        elif op == "A":
            rx, ry, rot = sc.number(), sc.number(), sc.number()
            large, sweep = sc.flag(), sc.flag()
            x, y = sc.number(), sc.number()
            end = Point(cur.x + x, cur.y + y) if rel else Point(x, y)
            cmds.extend(_arc_to_cubics(cur, rx, ry, rot, large, sweep, end))
            cur = end
        else:
            raise UnsupportedFeatureError(f"path command {letter!r}")
    return cmds


# --- shape elements ---


def _attr_float(attrib, name, default=0.0):
    raw = attrib.get(name)
    if raw is None:
        return default
    raw = raw.strip()
    if raw.endswith("px"):
        raw = raw[:-2]
    try:
        return float(raw)
    except ValueError:
        raise SvgParseError(f"attribute {name}={raw!r} is not a number") from None


def _ellipse_commands(cx, cy, rx, ry) -> list[Command]:
    kx, ky = KAPPA * rx, KAPPA * ry
    return [
        move_to(cx + rx, cy),
        cubic_to(cx + rx, cy + ky, cx + kx, cy + ry, cx, cy + ry),
        cubic_to(cx - kx, cy + ry, cx - rx, cy + ky, cx - rx, cy),
        cubic_to(cx - rx, cy - ky, cx - kx, cy - ry, cx, cy - ry),
        cubic_to(cx + kx, cy - ry, cx + rx, cy - ky, cx + rx, cy),
    ]


def _points_attr(attrib) -> list[Point]:
    vals = [float(v) for v in _NUMBER.findall(attrib.get("points", ""))]
    if len(vals) < 4 or len(vals) % 2:
        raise SvgParseError("points attribute needs an even number (>= 4) of values")
    return [Point(vals[i], vals[i + 1]) for i in range(0, len(vals), 2)]


def _shape_commands(tag: str, attrib) -> list[Command]:
    if tag == "path":
        d = attrib.get("d", "").strip()
        if not d:
            raise SvgParseError("path element without d attribute")
        return _parse_path_d(d)
    if tag == "rect":
        x, y = _attr_float(attrib, "x"), _attr_float(attrib, "y")
        w, h = _attr_float(attrib, "width"), _attr_float(attrib, "height")
        return [
            move_to(x, y),
            line_to(x + w, y),
            line_to(x + w, y + h),
            line_to(x, y + h),
            line_to(x, y),
        ]
    if tag == "circle":
        r = _attr_float(attrib, "r")
        return _ellipse_commands(_attr_float(attrib, "cx"), _attr_float(attrib, "cy"), r, r)
    if tag == "ellipse":
        return _ellipse_commands(
            _attr_float(attrib, "cx"),
            _attr_float(attrib, "cy"),
            _attr_float(attrib, "rx"),
            _attr_float(attrib, "ry"),
        )
    if tag == "line":
        return [
            move_to(_attr_float(attrib, "x1"), _attr_float(attrib, "y1")),
            line_to(_attr_float(attrib, "x2"), _attr_float(attrib, "y2")),
        ]
    if tag in ("polyline", "polygon"):
        pts = _points_attr(attrib)
        cmds = [move_to(pts[0].x, pts[0].y)]
        cmds.extend(line_to(p.x, p.y) for p in pts[1:])
        if tag == "polygon":
            cmds.append(line_to(pts[0].x, pts[0].y))
        return cmds
    raise UnsupportedFeatureError(f"element <{tag}>")


def _local_name(tag) -> str:
    if not isinstance(tag, str):  # comments / processing instructions
        return ""
    return tag.rsplit("}", 1)[-1]


def _walk(elem, matrix, paths: list[SvgPath]) -> None:
    tag = _local_name(elem.tag)
    if not tag or tag in _IGNORED:
        return
    own = elem.get("transform")
    if own:
        matrix = _compose(matrix, parse_transform(own))
    if tag in _CONTAINERS:
        for child in elem:
            _walk(child, matrix, paths)
        return
    if tag not in _SUPPORTED_SHAPES:
        raise UnsupportedFeatureError(f"element <{tag}>")
    cmds = _shape_commands(tag, elem.attrib)
    if matrix != IDENTITY:
        cmds = [
            Command(c.kind, tuple(_apply(matrix, p) for p in c.points)) for c in cmds
        ]
    if cmds:
        paths.append(SvgPath(tuple(cmds)))


def parse_svg(text: str) -> Icon:
    """Parse an SVG document into an (unquantized) Icon."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        line, col = getattr(exc, "position", (1, 0))
        prior = "\n".join(text.splitlines()[: line - 1])
        offset = len(prior.encode("utf-8")) + (1 if prior else 0) + col
        raise SvgParseError(f"malformed XML: {exc.msg.split(':')[0]}", offset) from exc
    if _local_name(root.tag) != "svg":
        raise SvgParseError(f"root element is <{_local_name(root.tag)}>, expected <svg>")
    paths: list[SvgPath] = []
    _walk(root, IDENTITY, paths)
    if not paths:
        raise SvgParseError("document contains no drawable paths")
    return Icon(tuple(paths))
