"""Training-sample assembly: pad, shift, and weight the loss.

A sample is the 50-token framed text segment followed by the 512-token
icon segment, both in the joint id space; the input is the target
shifted right with SOS in front. Loss weights are zero at padding
targets and at span-marker (MASK) targets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import masking, text_frontend, tokenizer
from ..joint_vocab import JointVocab
from ..text_frontend import TextVocab
from .ingest import Record

TEXT_LEN = text_frontend.TEXT_LEN  # 50
ICON_LEN = 512
SAMPLE_LEN = TEXT_LEN + ICON_LEN  # 562

MODE_KEYWORDS = "keywords"
MODE_PHRASE = "phrase"
MODE_BLANK = "blank"


@dataclass(frozen=True)
class SampleConfig:
    keyword_ratio: float = 0.60
    phrase_ratio: float = 0.30
    blank_ratio: float = 0.10
    mask_prob: float = 0.50
    span_policy: str = masking.PATH_ALIGNED

    def __post_init__(self):
        total = self.keyword_ratio + self.phrase_ratio + self.blank_ratio
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"text-mode ratios must sum to 1, got {total}")


@dataclass(frozen=True)
class TrainingSample:
    input_ids: np.ndarray  # (562,) int32, joint ids, SOS at position 0
    target_ids: np.ndarray  # (562,) int32
    loss_weight: np.ndarray  # (562,) float32 in {0, 1}
    mode: str
    masked: bool


def icon_segment(position: np.ndarray | int):
    """True where a target position belongs to the icon segment."""
    return np.asarray(position) >= TEXT_LEN


def _draw_mode(rng: np.random.Generator, cfg: SampleConfig) -> str:
    u = float(rng.random())
    if u < cfg.keyword_ratio:
        return MODE_KEYWORDS
    if u < cfg.keyword_ratio + cfg.phrase_ratio:
        return MODE_PHRASE
    return MODE_BLANK


def make_training_sample(
    record: Record,
    vocab: TextVocab,
    joint: JointVocab,
    rng: np.random.Generator,
    cfg: SampleConfig = SampleConfig(),
) -> TrainingSample:
    mode = _draw_mode(rng, cfg)
    if mode == MODE_KEYWORDS:
        text_ids = text_frontend.encode_keywords(list(record.keywords), vocab, rng)
    elif mode == MODE_PHRASE:
        # fall back to (unshuffled) keywords when no phrase is annotated
        prompt = record.phrase if record.phrase else " ".join(record.keywords)
        text_ids = text_frontend.encode_text(prompt, vocab)
    else:
        text_ids = text_frontend.encode_text("", vocab)

    icon_ids = tokenizer.encode_icon(record.icon)
    masked = False
    if rng.random() < cfg.mask_prob:
        if len(icon_ids) + 3 <= ICON_LEN:
            start, length = masking.sample_span(icon_ids, rng, cfg.span_policy)
            icon_ids = masking.apply_causal_mask(icon_ids, start, length).masked
            masked = True
        # else: masking skipped, the +3 rewrite would blow the budget

    target = np.full(SAMPLE_LEN, joint.pad_id, dtype=np.int32)
    target[:TEXT_LEN] = text_ids
    target[TEXT_LEN : TEXT_LEN + len(icon_ids)] = [joint.from_svg(t) for t in icon_ids]

    weight = np.ones(SAMPLE_LEN, dtype=np.float32)
    weight[target == joint.pad_id] = 0.0
    weight[target == text_frontend.PAD_ID] = 0.0
    weight[target == joint.from_svg(tokenizer.MASK)] = 0.0

    input_ids = np.empty(SAMPLE_LEN, dtype=np.int32)
    input_ids[0] = joint.sos_id
    input_ids[1:] = target[:-1]
    return TrainingSample(
        input_ids=input_ids,
        target_ids=target,
        loss_weight=weight,
        mode=mode,
        masked=masked,
    )


def _record_rng(seed: int, epoch: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, epoch, index]))


def stream_samples(
    records: list[Record],
    vocab: TextVocab,
    joint: JointVocab,
    cfg: SampleConfig,
    seed: int,
    epochs: int | None = None,
):
    """Deterministic sample stream: order and randomness depend only on
    (seed, epoch, record index), never on worker scheduling."""
    epoch = 0
    while epochs is None or epoch < epochs:
        order = np.random.default_rng(np.random.SeedSequence([seed, epoch])).permutation(
            len(records)
        )
        for idx in order:
            yield make_training_sample(
                records[int(idx)], vocab, joint, _record_rng(seed, epoch, int(idx)), cfg
            )
        epoch += 1


def _stack(buf: list[TrainingSample]) -> dict:
    return {
        "input_ids": np.stack([s.input_ids for s in buf]),
        "target_ids": np.stack([s.target_ids for s in buf]),
        "loss_weight": np.stack([s.loss_weight for s in buf]),
    }


def batches(sample_iter, batch_size: int, drop_last: bool = False):
    """Stack samples into arrays; yields dicts of (B, 562) arrays."""
    buf: list[TrainingSample] = []
    for sample in sample_iter:
        buf.append(sample)
        if len(buf) == batch_size:
            yield _stack(buf)
            buf = []
    if buf and not drop_last:
        yield _stack(buf)
