"""Joint id space the model operates on: text ids ++ SVG ids ++ {SOS, PAD}.

Layout for a text vocabulary of size T:

    [0, T)            text ids (including the text PAD/UNK/CLS/SEP)
    [T, T + 10007)    SVG ids, offset by T from iconsynth.tokenizer
    T + 10007         SOS (input-only shift token)
    T + 10008         PAD (icon-segment padding, excluded from the loss)
"""

from __future__ import annotations

from dataclasses import dataclass

from . import tokenizer


@dataclass(frozen=True)
class JointVocab:
    text_size: int

    @property
    def svg_base(self) -> int:
        return self.text_size

    @property
    def sos_id(self) -> int:
        return self.text_size + tokenizer.VOCAB_SIZE

    @property
    def pad_id(self) -> int:
        return self.sos_id + 1

    @property
    def size(self) -> int:
        return self.text_size + tokenizer.VOCAB_SIZE + 2

    def from_svg(self, svg_id: int) -> int:
        if not (0 <= svg_id < tokenizer.VOCAB_SIZE):
            raise ValueError(f"svg id {svg_id} outside [0, {tokenizer.VOCAB_SIZE})")
        return self.svg_base + svg_id

    def to_svg(self, joint_id: int) -> int:
        if not self.is_svg(joint_id):
            raise ValueError(f"joint id {joint_id} is not an SVG token")
        return joint_id - self.svg_base

    def is_text(self, joint_id: int) -> bool:
        return 0 <= joint_id < self.text_size

    def is_svg(self, joint_id: int) -> bool:
        return self.svg_base <= joint_id < self.svg_base + tokenizer.VOCAB_SIZE
