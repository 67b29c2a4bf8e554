"""Training loop: deterministic batch stream, Eq-style weighted loss,
clipped Adam updates under a warmup/linear-decay schedule."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..dataset.samples import TEXT_LEN, SampleConfig, batches, stream_samples
from ..joint_vocab import JointVocab
from ..text_frontend import TextVocab
from . import loss as loss_mod
from .nn import log_softmax
from .config import ModelConfig
from .optim import Adam, WarmupLinearDecay, clip_global_norm
from .params import init_params
from .transformer import Transformer


class TrainingDiverged(RuntimeError):
    def __init__(self, step: int, total, text, icon):
        super().__init__(
            f"non-finite loss at step {step}: total={total} text={text} icon={icon}"
        )
        self.step = step


@dataclass
class TrainConfig:
    steps: int = 200
    batch_size: int = 16
    lr: float = 6e-4
    warmup_frac: float = 0.05
    clip_norm: float = 1.0
    seed: int = 0
    log_every: int = 25


@dataclass
class StepMetrics:
    step: int
    total: float
    text: float
    icon: float
    lr: float
    grad_norm: float


def _crop_length(weights: np.ndarray) -> int:
    """Trailing positions whose targets all have zero weight cannot affect
    the loss (causal attention never looks right), so crop them."""
    cols = np.nonzero(weights.any(axis=0))[0]
    return int(cols[-1]) + 1 if len(cols) else 1


def train_step(
    transformer: Transformer,
    batch: dict,
    optimizer: Adam,
    lr: float,
    clip_norm: float,
    rng: np.random.Generator,
    step: int = 0,
) -> StepMetrics:
    cfg = transformer.cfg
    length = _crop_length(batch["loss_weight"])
    inputs = batch["input_ids"][:, :length]
    targets = batch["target_ids"][:, :length]
    weights = batch["loss_weight"][:, :length].astype(cfg.np_dtype)
    loss_mask = weights > 0
    logits, cache = transformer.forward(inputs, train=True, rng=rng, loss_mask=loss_mask)
    flat_targets = targets[loss_mask].astype(np.int64)
    flat_weights = weights[loss_mask]
    positions = np.tile(np.arange(length), (inputs.shape[0], 1))[loss_mask]
    is_icon = positions >= TEXT_LEN
    total, l_text, l_icon, dlogits = loss_mod.joint_loss(
        logits, flat_targets, flat_weights, is_icon, cfg.lambda_icon
    )
    if not np.isfinite(total):
        raise TrainingDiverged(step, total, l_text, l_icon)
    grads = transformer.backward(dlogits, cache)
    norm = clip_global_norm(grads, clip_norm)
    optimizer.step(transformer.params, grads, lr)
    return StepMetrics(step=step, total=total, text=l_text, icon=l_icon, lr=lr, grad_norm=norm)


def train_model(
    records,
    text_vocab: TextVocab,
    model_cfg: ModelConfig,
    train_cfg: TrainConfig,
    sample_cfg: SampleConfig = SampleConfig(),
    params: dict | None = None,
    progress=None,
    stop_check=None,
    on_step=None,
):
    """Train from scratch (or continue from params). Returns the
    transformer and the per-step metrics history.

    stop_check(step, history) may return True to stop early; progress
    receives each StepMetrics; on_step(transformer, metrics) additionally
    exposes the live model (e.g. for periodic checkpoints).
    """
    joint = JointVocab(text_vocab.size)
    if model_cfg.text_vocab_size != text_vocab.size:
        raise ValueError(
            f"config text_vocab_size {model_cfg.text_vocab_size} != vocab {text_vocab.size}"
        )
    if params is None:
        params = init_params(model_cfg, np.random.default_rng(model_cfg.seed))
    transformer = Transformer(model_cfg, params)
    optimizer = Adam(params)
    schedule = WarmupLinearDecay(train_cfg.lr, train_cfg.steps, train_cfg.warmup_frac)
    stream = batches(
        stream_samples(records, text_vocab, joint, sample_cfg, train_cfg.seed),
        train_cfg.batch_size,
        drop_last=True,
    )
    history: list[StepMetrics] = []
    for step in range(train_cfg.steps):
        batch = next(stream)
        rng = np.random.default_rng(np.random.SeedSequence([train_cfg.seed, 7, step]))
        metrics = train_step(
            transformer, batch, optimizer, schedule.lr(step), train_cfg.clip_norm, rng, step
        )
        history.append(metrics)
        if progress is not None:
            progress(metrics)
        if on_step is not None:
            on_step(transformer, metrics)
        if stop_check is not None and stop_check(step, history):
            break
    return transformer, history


def evaluate_icon_ce(
    transformer: Transformer,
    records,
    text_vocab: TextVocab,
    text_mode: str = "blank",
    batch_size: int = 16,
) -> float:
    """Mean per-token icon cross-entropy over unmasked samples."""
    joint = JointVocab(text_vocab.size)
    cfg_s = SampleConfig(
        keyword_ratio=1.0 if text_mode == "keywords" else 0.0,
        phrase_ratio=1.0 if text_mode == "phrase" else 0.0,
        blank_ratio=1.0 if text_mode == "blank" else 0.0,
        mask_prob=0.0,
    )
    stream = stream_samples(records, text_vocab, joint, cfg_s, seed=0, epochs=1)
    total_ce = 0.0
    total_w = 0.0
    for batch in batches(stream, min(batch_size, len(records))):
        length = _crop_length(batch["loss_weight"])
        inputs = batch["input_ids"][:, :length]
        targets = batch["target_ids"][:, :length]
        weights = batch["loss_weight"][:, :length]
        loss_mask = weights > 0
        logits, _ = transformer.forward(inputs, train=False, loss_mask=loss_mask)
        flat_targets = targets[loss_mask].astype(np.int64)
        positions = np.tile(np.arange(length), (inputs.shape[0], 1))[loss_mask]
        icon_rows = positions >= TEXT_LEN
        logp = log_softmax(logits)
        ce = -logp[np.arange(len(flat_targets)), flat_targets]
        total_ce += float(ce[icon_rows].sum())
        total_w += float(icon_rows.sum())
    return total_ce / max(total_w, 1.0)
