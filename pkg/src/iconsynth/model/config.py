"""Model hyperparameters. Desk defaults (4 layers, D=128) train on a CPU;
the production-scale values (12 layers, larger D) stay reachable here."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .. import tokenizer
from ..dataset.samples import ICON_LEN, SAMPLE_LEN, TEXT_LEN


@dataclass(frozen=True)
class ModelConfig:
    layers: int = 4
    heads: int = 4
    dim: int = 128
    ffn_mult: int = 4
    dropout: float = 0.1
    text_vocab_size: int = 4
    lambda_icon: float = 7.0
    dtype: str = "float32"
    seed: int = 0
    # non-location tokens add zero coordinate terms by default; optionally
    # give them a learned "null" column in the coordinate tables instead
    coord_null_columns: bool = False

    text_len: int = TEXT_LEN
    icon_len: int = ICON_LEN

    def __post_init__(self):
        if self.dim % self.heads:
            raise ValueError(f"dim {self.dim} not divisible by heads {self.heads}")
        for name in ("layers", "heads", "dim", "ffn_mult", "text_vocab_size"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.dtype not in ("float32", "float64"):
            raise ValueError(f"dtype must be float32 or float64, got {self.dtype!r}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")

    @property
    def max_len(self) -> int:
        return self.text_len + self.icon_len

    @property
    def svg_vocab(self) -> int:
        return tokenizer.VOCAB_SIZE

    @property
    def joint_vocab(self) -> int:
        # text ++ SVG ++ {SOS, PAD}
        return self.text_vocab_size + tokenizer.VOCAB_SIZE + 2

    @property
    def ffn_dim(self) -> int:
        return self.dim * self.ffn_mult

    @property
    def coord_rows(self) -> int:
        return 101 if self.coord_null_columns else 100

    @property
    def np_dtype(self):
        import numpy as np

        return np.float32 if self.dtype == "float32" else np.float64

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        known = {f for f in cls.__dataclass_fields__}
        return cls(**{k: v for k, v in d.items() if k in known})


assert SAMPLE_LEN == TEXT_LEN + ICON_LEN
