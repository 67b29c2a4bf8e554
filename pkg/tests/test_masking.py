import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from iconsynth import masking, tokenizer as tok
from iconsynth.dataset import synth_corpus

A, B, C, D, E = 100, 101, 102, 103, 104  # arbitrary non-marker ids


class TestApplyCausalMask:
    def test_middle_span(self):
        s = masking.apply_causal_mask([A, B, C, D, E], 2, 2)
        assert s.masked == [A, B, tok.MASK, E, tok.MASK, C, D, tok.EOM]

    def test_full_span(self):
        s = masking.apply_causal_mask([A, B], 0, 2)
        assert s.masked == [tok.MASK, tok.MASK, A, B, tok.EOM]

    def test_suffix_span(self):
        s = masking.apply_causal_mask([A, B, C], 2, 1)
        assert s.masked == [A, B, tok.MASK, tok.MASK, C, tok.EOM]

    def test_length_arithmetic(self):
        s = masking.apply_causal_mask([A, B, C, D], 1, 2)
        assert len(s.masked) == 4 + 3

    def test_marker_counts(self):
        s = masking.apply_causal_mask([A, B, C, D], 0, 3)
        assert s.masked.count(tok.MASK) == 2
        assert s.masked.count(tok.EOM) == 1

    def test_out_of_bounds(self):
        with pytest.raises(masking.SpanError):
            masking.apply_causal_mask([A, B], 1, 2)
        with pytest.raises(masking.SpanError):
            masking.apply_causal_mask([A, B], 0, 0)
        with pytest.raises(masking.SpanError):
            masking.apply_causal_mask([A, B], -1, 1)

    def test_rejects_sequences_with_markers(self):
        with pytest.raises(masking.SpanError):
            masking.apply_causal_mask([A, tok.MASK], 0, 1)


class TestReassemble:
    def test_inverse_of_example(self):
        assert masking.reassemble([A, B, tok.MASK, E, tok.MASK, C, D, tok.EOM]) == [A, B, C, D, E]

    def test_empty_everything(self):
        assert masking.reassemble([tok.MASK, tok.MASK, tok.EOM]) == []

    def test_structure_errors_name_marker(self):
        with pytest.raises(masking.StructureError, match="MASK"):
            masking.reassemble([A, tok.MASK, B])
        with pytest.raises(masking.StructureError, match="EOM"):
            masking.reassemble([tok.MASK, A, tok.MASK, B])
        with pytest.raises(masking.StructureError, match="EOM"):
            masking.reassemble([tok.MASK, tok.MASK, tok.EOM, A])


class TestSampleSpan:
    def _icon_seq(self, n_paths=3):
        recs = synth_corpus(n_paths, np.random.default_rng(0), families=["square"])
        seq = []
        for r in recs:
            seq.extend(tok.encode_icon(r.icon)[:-1])
        return seq + [tok.EOS]

    def test_single_path_forced(self):
        recs = synth_corpus(1, np.random.default_rng(0), families=["circle"])
        seq = tok.encode_icon(recs[0].icon)
        start, length = masking.sample_span(seq, np.random.default_rng(1))
        assert start == 0
        assert length == len(seq) - 1  # everything except EOS

    def test_seeded_reproducibility(self):
        seq = self._icon_seq()
        a = masking.sample_span(seq, np.random.default_rng(42))
        b = masking.sample_span(seq, np.random.default_rng(42))
        assert a == b

    def test_path_aligned_never_includes_eos(self):
        seq = self._icon_seq()
        for seed in range(50):
            start, length = masking.sample_span(seq, np.random.default_rng(seed))
            assert start + length <= len(seq) - 1
            assert seq[start] == tok.BOP

    def test_start_distribution_uniform(self):
        seq = self._icon_seq(3)
        bops = [i for i, t in enumerate(seq) if t == tok.BOP]
        rng = np.random.default_rng(0)
        counts = {b: 0 for b in bops}
        n = 10_000
        for _ in range(n):
            start, _ = masking.sample_span(seq, rng)
            counts[start] += 1
        for b in bops:
            assert abs(counts[b] / n - 1 / 3) < 0.02

    def test_token_level_policy(self):
        seq = [A, B, C, D, tok.EOS]
        rng = np.random.default_rng(3)
        for _ in range(100):
            start, length = masking.sample_span(seq, rng, masking.TOKEN_LEVEL)
            assert start + length <= 4 and length >= 1

    def test_no_bop_policy_error(self):
        with pytest.raises(masking.SpanError):
            masking.sample_span([A, B, tok.EOS], np.random.default_rng(0))


@settings(max_examples=500, deadline=None)
@given(
    st.lists(st.integers(0, tok.VOCAB_SIZE - 3), min_size=1, max_size=40),
    st.data(),
)
def test_property_round_trip(seq, data):
    seq = [t for t in seq if t not in (tok.MASK, tok.EOM)]
    if not seq:
        seq = [A]
    start = data.draw(st.integers(0, len(seq) - 1))
    length = data.draw(st.integers(1, len(seq) - start))
    sample = masking.apply_causal_mask(seq, start, length)
    assert masking.reassemble(sample.masked) == seq
    assert len(sample.masked) == len(seq) + 3
