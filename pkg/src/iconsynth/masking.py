"""Span-masking rewrite that lets a left-to-right model infill.

A masked sample moves the span to the end of the sequence:

    [Left : MASK : Right : MASK : Span : EOM]

so the model sees both contexts before predicting the span. reassemble
is the exact inverse used at inference time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tokenizer import BOP, EOM, EOS, MASK

PATH_ALIGNED = "path"
TOKEN_LEVEL = "token"


class SpanError(ValueError):
    pass


class StructureError(ValueError):
    """A masked sequence missing or duplicating its marker tokens."""


@dataclass(frozen=True)
class MaskedSample:
    masked: list[int]
    span_start: int
    span_len: int


def apply_causal_mask(seq: list[int], span_start: int, span_len: int) -> MaskedSample:
    """Rewrite seq as Left + [MASK] + Right + [MASK] + Span + [EOM]."""
    n = len(seq)
    if span_len < 1:
        raise SpanError(f"span length must be >= 1, got {span_len}")
    if span_start < 0 or span_start + span_len > n:
        raise SpanError(
            f"span [{span_start}, {span_start + span_len}) out of bounds for length {n}"
        )
    if any(t in (MASK, EOM) for t in seq):
        raise SpanError("sequence already contains marker tokens")
    left = seq[:span_start]
    span = seq[span_start : span_start + span_len]
    right = seq[span_start + span_len :]
    masked = left + [MASK] + right + [MASK] + span + [EOM]
    return MaskedSample(masked=masked, span_start=span_start, span_len=span_len)


def sample_span(
    seq: list[int], rng: np.random.Generator, policy: str = PATH_ALIGNED
) -> tuple[int, int]:
    """Draw a (start, length) span that never covers the trailing EOS.

    path policy: the span starts at a uniformly chosen BOP and covers a
    uniformly chosen run of 1..remaining whole paths.
    token policy: uniform start, uniform length >= 1 over the non-EOS body.
    """
    if policy == PATH_ALIGNED:
        bops = [i for i, t in enumerate(seq) if t == BOP]
        if not bops:
            raise SpanError("path-aligned policy needs at least one BOP")
        boundaries = bops + [len(seq) - 1 if seq and seq[-1] == EOS else len(seq)]
        pi = int(rng.integers(len(bops)))
        count = int(rng.integers(1, len(bops) - pi + 1))
        start = boundaries[pi]
        end = boundaries[pi + count]
        return start, end - start
    if policy == TOKEN_LEVEL:
        body = len(seq) - 1 if seq and seq[-1] == EOS else len(seq)
        if body < 1:
            raise SpanError("sequence too short to mask")
        start = int(rng.integers(body))
        length = int(rng.integers(1, body - start + 1))
        return start, length
    raise ValueError(f"unknown span policy {policy!r}")


def reassemble(seq: list[int]) -> list[int]:
    """Move the span back to the first MASK position, dropping all markers."""
    marks = [i for i, t in enumerate(seq) if t == MASK]
    if len(marks) != 2:
        raise StructureError(f"expected exactly two MASK tokens, found {len(marks)}")
    first, second = marks
    eoms = [i for i, t in enumerate(seq) if t == EOM]
    if len(eoms) != 1:
        raise StructureError(f"expected exactly one EOM token, found {len(eoms)}")
    eom = eoms[0]
    if eom != len(seq) - 1 or eom < second:
        raise StructureError("EOM must terminate the span after the second MASK")
    left = seq[:first]
    right = seq[first + 1 : second]
    span = seq[second + 1 : eom]
    return left + span + right
