import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iconsynth import tokenizer as tok
from iconsynth.geometry import Icon, SvgPath, cubic_to, line_to, move_to

from conftest import random_quantized_icon


class TestVocabularyLayout:
    def test_size_is_10007(self):
        assert tok.VOCAB_SIZE == 10007

    def test_layout_constants(self):
        assert (tok.CMD_M, tok.CMD_L, tok.CMD_C) == (0, 1, 2)
        assert tok.LOC_BASE == 3
        assert (tok.BOP, tok.EOS, tok.MASK, tok.EOM) == (10003, 10004, 10005, 10006)

    def test_every_id_names_exactly_one_token(self):
        names = [tok.token_name(i) for i in range(tok.VOCAB_SIZE)]
        assert len(set(names)) == tok.VOCAB_SIZE


class TestPacking:
    @pytest.mark.parametrize("x,y,v", [(20, 10, 2010), (0, 0, 0), (99, 99, 9999)])
    def test_examples(self, x, y, v):
        assert tok.pack_location(x, y) == v
        assert tok.unpack_location(v) == (x, y)

    def test_bijection_exhaustive(self):
        seen = set()
        for x in range(100):
            for y in range(100):
                v = tok.pack_location(x, y)
                assert 0 <= v < 10000
                assert tok.unpack_location(v) == (x, y)
                seen.add(v)
        assert len(seen) == 10000

    def test_range_errors(self):
        with pytest.raises(ValueError):
            tok.pack_location(100, 0)
        with pytest.raises(ValueError):
            tok.pack_location(0, -1)
        with pytest.raises(ValueError):
            tok.unpack_location(10000)


class TestEncode:
    def test_simple_example(self):
        icon = Icon((SvgPath((move_to(20, 10), line_to(30, 10))),))
        ids = tok.encode_icon(icon)
        assert ids == [tok.BOP, tok.CMD_M, tok.LOC_BASE + 2010, tok.CMD_L,
                       tok.LOC_BASE + 3010, tok.EOS]
        assert len(ids) == 6

    def test_two_path_clock_shape_length(self):
        # path 1: M + 4 cubics, path 2: M + 2 lines
        p1 = [move_to(50, 10)] + [cubic_to(1, 2, 3, 4, 5, 6)] * 4
        p2 = [move_to(50, 50), line_to(50, 30), line_to(60, 50)]
        icon = Icon((SvgPath(tuple(p1)), SvgPath(tuple(p2))))
        ids = tok.encode_icon(icon)
        assert len(ids) == 1 + (1 + 2 + 4 * 4) + (1 + 2 + 2 * 2) == 27
        assert len(ids) == tok.encoded_length(icon)

    def test_minimal_icon(self):
        icon = Icon((SvgPath((move_to(3, 4),)),))
        assert tok.encode_icon(icon) == [tok.BOP, tok.CMD_M, tok.loc_token(3, 4), tok.EOS]

    def test_unquantized_rejected(self):
        icon = Icon((SvgPath((move_to(1.5, 0),)),))
        with pytest.raises(tok.TokenizeError):
            tok.encode_icon(icon)

    def test_length_formula_random(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            icon = random_quantized_icon(rng)
            ids = tok.encode_icon(icon)
            # independent counter: walk the structure
            expected = 1
            for path in icon:
                expected += 1
                for cmd in path:
                    expected += 1 + len(cmd.points)
            assert len(ids) == expected


class TestDecode:
    def test_round_trip_random(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            icon = random_quantized_icon(rng)
            assert tok.decode_icon(tok.encode_icon(icon)) == icon

    def test_round_trip_corpus(self, small_corpus):
        for rec in small_corpus:
            assert tok.decode_icon(tok.encode_icon(rec.icon), tok.STRICT) == rec.icon

    def test_arity_error_position(self):
        seq = [tok.BOP, tok.CMD_M, tok.LOC_BASE, tok.CMD_C,
               tok.LOC_BASE + 1, tok.LOC_BASE + 2, tok.EOS]
        with pytest.raises(tok.DecodeError) as exc:
            tok.decode_icon(seq, tok.STRICT)
        assert exc.value.index == 6
        assert "CubicBezier" in exc.value.reason and "3" in exc.value.reason

    def test_arity_error_lenient_recovers_prefix(self):
        seq = [tok.BOP, tok.CMD_M, tok.LOC_BASE, tok.CMD_C,
               tok.LOC_BASE + 1, tok.LOC_BASE + 2, tok.EOS]
        icon = tok.decode_icon(seq, tok.LENIENT)
        assert icon == Icon((SvgPath((move_to(0, 0),)),))

    def test_missing_bop(self):
        with pytest.raises(tok.DecodeError) as exc:
            tok.decode_icon([tok.CMD_M, tok.LOC_BASE, tok.EOS], tok.STRICT)
        assert exc.value.index == 0
        assert "BOP" in exc.value.reason

    def test_path_must_start_with_move(self):
        with pytest.raises(tok.DecodeError):
            tok.decode_icon([tok.BOP, tok.CMD_L, tok.LOC_BASE, tok.EOS], tok.STRICT)

    def test_missing_eos(self):
        with pytest.raises(tok.DecodeError, match="EOS"):
            tok.decode_icon([tok.BOP, tok.CMD_M, tok.LOC_BASE], tok.STRICT)

    def test_content_after_eos(self):
        seq = [tok.BOP, tok.CMD_M, tok.LOC_BASE, tok.EOS, tok.EOS]
        with pytest.raises(tok.DecodeError, match="after EOS"):
            tok.decode_icon(seq, tok.STRICT)

    def test_mask_rejected_strict(self):
        with pytest.raises(tok.DecodeError):
            tok.decode_icon([tok.BOP, tok.MASK, tok.EOS], tok.STRICT)

    def test_lenient_empty_result_errors(self):
        with pytest.raises(tok.DecodeError):
            tok.decode_icon([tok.EOS], tok.LENIENT)
        with pytest.raises(tok.DecodeError):
            tok.decode_icon([tok.BOP, tok.CMD_M], tok.LENIENT)

    def test_out_of_vocab_id(self):
        with pytest.raises(tok.DecodeError):
            tok.decode_icon([tok.BOP, tok.CMD_M, 99999, tok.EOS], tok.STRICT)


@st.composite
def icon_strategy(draw):
    n_paths = draw(st.integers(1, 3))
    paths = []
    for _ in range(n_paths):
        n_cmds = draw(st.integers(1, 4))
        cmds = []
        for j in range(n_cmds):
            kind = "M" if j == 0 else draw(st.sampled_from(["M", "L", "C"]))
            arity = 3 if kind == "C" else 1
            pts = []
            for _ in range(arity):
                pts.append((draw(st.integers(0, 99)), draw(st.integers(0, 99))))
            from iconsynth.geometry import Command, Point

            cmds.append(Command(kind, tuple(Point(*p) for p in pts)))
        paths.append(SvgPath(tuple(cmds)))
    return Icon(tuple(paths))


@settings(max_examples=200, deadline=None)
@given(icon_strategy())
def test_property_encode_decode_bijection(icon):
    assert tok.decode_icon(tok.encode_icon(icon), tok.STRICT) == icon


def test_token_line_format(tmp_path):
    rng = np.random.default_rng(2)
    seqs = [tok.encode_icon(random_quantized_icon(rng)) for _ in range(10)]
    path = tmp_path / "icons.tokens"
    tok.write_token_lines(path, seqs)
    assert list(tok.read_token_lines(path)) == seqs
