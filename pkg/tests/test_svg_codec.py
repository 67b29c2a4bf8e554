import math

import numpy as np
import pytest

from iconsynth.geometry import Command, Icon, Point, SvgPath, line_to, move_to
from iconsynth.svg_codec import (
    CodecError,
    SvgParseError,
    UnsupportedFeatureError,
    available_backends,
    normalize_and_quantize,
    parse_svg,
    rasterize,
    serialize_svg,
)
from iconsynth.svg_codec.raster import flatten_cubic

from conftest import random_quantized_icon


def cubic_point(p0, p1, p2, p3, t):
    u = 1 - t
    return (
        u**3 * p0[0] + 3 * u**2 * t * p1[0] + 3 * u * t**2 * p2[0] + t**3 * p3[0],
        u**3 * p0[1] + 3 * u**2 * t * p1[1] + 3 * u * t**2 * p2[1] + t**3 * p3[1],
    )


class TestParse:
    def test_simple_path(self):
        icon = parse_svg('<svg><path d="M 20 10 L 30 10"/></svg>')
        assert icon.paths == (SvgPath((move_to(20, 10), line_to(30, 10))),)

    def test_rect_decomposition(self):
        icon = parse_svg('<svg><rect x="0" y="0" width="10" height="10"/></svg>')
        assert icon.paths[0].commands == (
            move_to(0, 0),
            line_to(10, 0),
            line_to(10, 10),
            line_to(0, 10),
            line_to(0, 0),
        )

    def test_circle_max_radial_deviation(self):
        # brute force: densely sample each cubic, measure | |p-c| - r |
        icon = parse_svg('<svg><circle cx="50" cy="50" r="40"/></svg>')
        path = icon.paths[0]
        cur = path.commands[0].end
        worst = 0.0
        for cmd in path.commands[1:]:
            assert cmd.kind == "C"
            pts = [tuple(p) for p in cmd.points]
            for t in np.linspace(0, 1, 400):
                x, y = cubic_point(tuple(cur), *pts, t)
                worst = max(worst, abs(math.hypot(x - 50, y - 50) - 40))
            cur = cmd.end
        assert worst < 0.001 * 40

    def test_relative_commands_and_hv(self):
        icon = parse_svg('<svg><path d="m 5 5 l 10 0 h 5 v 3 H 30 V 20"/></svg>')
        pts = [c.end for c in icon.paths[0]]
        assert pts == [
            Point(5, 5),
            Point(15, 5),
            Point(20, 5),
            Point(20, 8),
            Point(30, 8),
            Point(30, 20),
        ]

    def test_close_returns_to_subpath_start(self):
        icon = parse_svg('<svg><path d="M 1 2 L 5 2 Z"/></svg>')
        assert icon.paths[0].commands[-1] == line_to(1, 2)

    def test_quadratic_degree_elevation_is_exact(self):
        icon = parse_svg('<svg><path d="M 0 0 Q 10 20 20 0"/></svg>')
        cmd = icon.paths[0].commands[1]
        assert cmd.kind == "C"
        # elevated cubic must trace the same curve as the quadratic
        for t in np.linspace(0, 1, 50):
            u = 1 - t
            qx = u**2 * 0 + 2 * u * t * 10 + t**2 * 20
            qy = u**2 * 0 + 2 * u * t * 20 + t**2 * 0
            cx, cy = cubic_point((0, 0), *[tuple(p) for p in cmd.points], t)
            assert abs(qx - cx) < 1e-9 and abs(qy - cy) < 1e-9

    def test_arc_subdivision_accuracy(self):
        # half circle arc of radius 10: every cubic sample stays near radius
        icon = parse_svg('<svg><path d="M 10 0 A 10 10 0 0 1 -10 0"/></svg>')
        cmds = icon.paths[0].commands
        assert all(c.kind == "C" for c in cmds[1:])
        assert len(cmds) - 1 == 2  # 180 degrees -> two <=90-degree segments
        cur = cmds[0].end
        for cmd in cmds[1:]:
            for t in np.linspace(0, 1, 200):
                x, y = cubic_point(tuple(cur), *[tuple(p) for p in cmd.points], t)
                assert abs(math.hypot(x, y) - 10) < 0.01
            cur = cmd.end

    def test_transform_flattening(self):
        icon = parse_svg(
            '<svg><g transform="translate(10 5)">'
            '<path transform="scale(2)" d="M 1 1 L 2 1"/></g></svg>'
        )
        assert [tuple(c.end) for c in icon.paths[0]] == [(12, 7), (14, 7)]

    def test_polygon_closes_polyline_does_not(self):
        poly = parse_svg('<svg><polygon points="0,0 4,0 4,4"/></svg>')
        assert poly.paths[0].commands[-1] == line_to(0, 0)
        line = parse_svg('<svg><polyline points="0,0 4,0 4,4"/></svg>')
        assert line.paths[0].commands[-1] == line_to(4, 4)

    def test_malformed_xml_reports_byte_offset(self):
        with pytest.raises(SvgParseError) as exc:
            parse_svg("<svg><path d='M 0 0'")
        assert exc.value.byte_offset >= 0

    def test_unsupported_element_named(self):
        with pytest.raises(UnsupportedFeatureError, match="text"):
            parse_svg("<svg><text>hi</text></svg>")
        with pytest.raises(UnsupportedFeatureError, match="image"):
            parse_svg('<svg><image href="x.png"/></svg>')

    def test_unsupported_smooth_shorthand(self):
        with pytest.raises(UnsupportedFeatureError, match="S"):
            parse_svg('<svg><path d="M 0 0 S 1 1 2 2"/></svg>')

    def test_namespaced_document(self):
        icon = parse_svg(
            '<svg xmlns="http://www.w3.org/2000/svg"><path d="M 0 0 L 1 1"/></svg>'
        )
        assert len(icon.paths) == 1

    def test_compact_arc_flags(self):
        icon = parse_svg('<svg><path d="M 0 0 A 5 5 0 0110 0"/></svg>')
        assert icon.paths[0].commands[-1].end == Point(10, 0)


class TestQuantize:
    def test_identity_on_full_range(self):
        icon = Icon((SvgPath((move_to(0, 0), line_to(99, 99))),))
        assert normalize_and_quantize(icon) == icon

    def test_degenerate_bbox_maps_to_center(self):
        icon = Icon((SvgPath((move_to(5, 5),)),))
        q = normalize_and_quantize(icon)
        assert q.paths[0].commands[0].end == Point(50, 50)

    def test_wide_bbox_centers_short_axis(self):
        # bbox (0,0)-(200,100): scale 99/200, y offset round(24.75) = 25
        icon = Icon((SvgPath((move_to(0, 0), line_to(200, 100))),))
        q = normalize_and_quantize(icon)
        assert q.paths[0].commands[0].end == Point(0, 25)
        assert q.paths[0].commands[1].end == Point(99, 74)
        # brute-force bbox check after transform
        xs = [p.x for p in q.all_points()]
        ys = [p.y for p in q.all_points()]
        assert min(xs) == 0 and max(xs) == 99
        assert 0 <= min(ys) and max(ys) <= 99

    def test_idempotent(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            pts = rng.uniform(-50, 250, size=(int(rng.integers(2, 8)), 2))
            cmds = [move_to(*pts[0])] + [line_to(*p) for p in pts[1:]]
            q1 = normalize_and_quantize(Icon((SvgPath(tuple(cmds)),)))
            q2 = normalize_and_quantize(q1)
            assert q1 == q2

    def test_in_range_and_integer(self):
        rng = np.random.default_rng(8)
        pts = rng.uniform(-1000, 1000, size=(10, 2))
        cmds = [move_to(*pts[0])] + [line_to(*p) for p in pts[1:]]
        q = normalize_and_quantize(Icon((SvgPath(tuple(cmds)),)))
        assert q.is_quantized()


class TestSerialize:
    def test_canonical_form(self):
        icon = Icon((SvgPath((move_to(20, 10), line_to(30, 10))),))
        expected = '<svg viewBox="0 0 100 100"><path d="M 20 10 L 30 10" fill="black"/></svg>'
        assert " ".join(serialize_svg(icon).split()) == " ".join(expected.split())

    def test_round_trip(self):
        rng = np.random.default_rng(9)
        for _ in range(100):
            icon = random_quantized_icon(rng)
            assert parse_svg(serialize_svg(icon)) == icon

    def test_round_trip_corpus(self, small_corpus):
        for rec in small_corpus:
            assert parse_svg(serialize_svg(rec.icon)) == rec.icon

    def test_round_trip_through_quantize_on_normalized_icons(self, small_corpus):
        # for bbox-normalized icons (the ingested form), serialize -> parse
        # -> quantize reproduces the icon exactly
        for rec in small_corpus:
            nq = normalize_and_quantize(rec.icon)
            assert normalize_and_quantize(parse_svg(serialize_svg(nq))) == nq

    def test_unquantized_rejected(self):
        icon = Icon((SvgPath((move_to(0.5, 0),)),))
        with pytest.raises(CodecError):
            serialize_svg(icon)

    def test_xmlns_variant_parses_identically(self):
        icon = Icon((SvgPath((move_to(1, 2), line_to(3, 4))),))
        assert parse_svg(serialize_svg(icon, include_xmlns=True)) == icon


def winding_number(point, polys):
    """Brute-force point-in-polygon winding count over closed polylines."""
    wn = 0
    px, py = point
    for poly in polys:
        for i in range(len(poly)):
            x0, y0 = poly[i]
            x1, y1 = poly[(i + 1) % len(poly)]
            if y0 <= py < y1 or y1 <= py < y0:
                t = (py - y0) / (y1 - y0)
                if x0 + t * (x1 - x0) > px:
                    wn += 1 if y1 > y0 else -1
    return wn


class TestRasterize:
    def test_background_is_white(self):
        icon = Icon((SvgPath((move_to(0, 0), line_to(5, 0), line_to(5, 5), line_to(0, 5))),))
        img = rasterize(icon, 16)
        assert img.pixels[15, 15] == 1.0

    def test_full_viewbox_rectangle_all_black(self):
        icon = parse_svg('<svg><rect x="0" y="0" width="100" height="100"/></svg>')
        img = rasterize(icon, 16)
        assert (img.pixels == 0.0).all()

    def test_nonzero_rule_union_of_same_direction_rects(self):
        # two overlapping same-direction rectangles fill as their union
        d = "M 10 10 L 60 10 L 60 60 L 10 60 Z M 40 40 L 90 40 L 90 90 L 40 90 Z"
        icon = parse_svg(f'<svg><path d="{d}"/></svg>')
        res = 25
        img = rasterize(icon, res)
        scale = res / 100.0
        polys = [
            [(10 * scale, 10 * scale), (60 * scale, 10 * scale), (60 * scale, 60 * scale), (10 * scale, 60 * scale)],
            [(40 * scale, 40 * scale), (90 * scale, 40 * scale), (90 * scale, 90 * scale), (40 * scale, 90 * scale)],
        ]
        for row in range(res):
            for col in range(res):
                inside = winding_number((col + 0.5, row + 0.5), polys) != 0
                assert (img.pixels[row, col] == 0.0) == inside

    def test_deterministic(self):
        rng = np.random.default_rng(10)
        icon = random_quantized_icon(rng)
        a = rasterize(icon, 32)
        b = rasterize(icon, 32)
        assert np.array_equal(a.pixels, b.pixels)

    def test_backends_agree(self):
        backends = available_backends()
        if len(backends) < 2:
            pytest.skip("compiled kernel not built")
        rng = np.random.default_rng(11)
        for _ in range(20):
            icon = random_quantized_icon(rng)
            imgs = [rasterize(icon, 24, kernel=k).pixels for k in backends.values()]
            assert np.array_equal(imgs[0], imgs[1])

    def test_resolution_precondition(self):
        icon = Icon((SvgPath((move_to(0, 0),)),))
        with pytest.raises(ValueError):
            rasterize(icon, 4)

    def test_flatten_chord_tolerance(self):
        pts = [(0.0, 0.0), (10.0, 20.0), (30.0, -20.0), (40.0, 0.0)]
        poly = [pts[0]] + flatten_cubic(*pts, tol=0.25)
        # every sampled curve point lies within ~tol of the polyline
        for t in np.linspace(0, 1, 300):
            x, y = cubic_point(*pts, t)
            best = min(
                _seg_dist((x, y), poly[i], poly[i + 1]) for i in range(len(poly) - 1)
            )
            assert best <= 0.3


def _seg_dist(p, a, b):
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    if L2 == 0:
        return math.hypot(px - ax, py - ay)
    t = max(0.0, min(1.0, ((px - ax) * dx + (py - ay) * dy) / L2))
    return math.hypot(px - (ax + t * dx), py - (ay + t * dy))


class TestGeometryInvariants:
    def test_command_arity_enforced(self):
        with pytest.raises(ValueError):
            Command("M", (Point(0, 0), Point(1, 1)))
        with pytest.raises(ValueError):
            Command("C", (Point(0, 0),))

    def test_path_must_open_with_move(self):
        with pytest.raises(ValueError):
            SvgPath((line_to(1, 1),))

    def test_icon_nonempty(self):
        with pytest.raises(ValueError):
            Icon(())
