"""Model package: config, parameters, transformer, loss, optimizer,
checkpoint format, and the IconModel facade bundling a trained network
with its text vocabulary."""

from __future__ import annotations

from dataclasses import dataclass

from ..joint_vocab import JointVocab
from ..text_frontend import TextVocab
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .config import ModelConfig
from .params import init_params, param_count, param_spec
from .train import TrainConfig, TrainingDiverged, evaluate_icon_ce, train_model, train_step
from .transformer import DecodeSession, Transformer


@dataclass
class IconModel:
    """A transformer plus the text vocabulary it was trained with."""

    transformer: Transformer
    text_vocab: TextVocab

    @property
    def config(self) -> ModelConfig:
        return self.transformer.cfg

    @property
    def joint(self) -> JointVocab:
        return self.transformer.joint

    def session(self) -> DecodeSession:
        return DecodeSession(self.transformer)

    def save(self, ckpt_path, vocab_path=None, extra: dict | None = None) -> None:
        save_checkpoint(
            ckpt_path,
            self.config,
            self.transformer.params,
            self.text_vocab.fingerprint(),
            extra=extra,
        )
        if vocab_path is not None:
            self.text_vocab.save(vocab_path)

    @classmethod
    def load(cls, ckpt_path, vocab_path) -> "IconModel":
        cfg, params, header = load_checkpoint(ckpt_path)
        vocab = TextVocab.load(vocab_path)
        if vocab.fingerprint() != header["text_vocab_sha256"]:
            raise CheckpointError(
                "text vocabulary does not match the checkpoint fingerprint"
            )
        if cfg.text_vocab_size != vocab.size:
            raise CheckpointError("text vocabulary size does not match the config")
        return cls(transformer=Transformer(cfg, params), text_vocab=vocab)

    @classmethod
    def fresh(cls, cfg: ModelConfig, text_vocab: TextVocab) -> "IconModel":
        import numpy as np

        if cfg.text_vocab_size != text_vocab.size:
            cfg = ModelConfig.from_dict({**cfg.to_dict(), "text_vocab_size": text_vocab.size})
        params = init_params(cfg, np.random.default_rng(cfg.seed))
        return cls(transformer=Transformer(cfg, params), text_vocab=text_vocab)


__all__ = [
    "IconModel",
    "ModelConfig",
    "Transformer",
    "DecodeSession",
    "TrainConfig",
    "TrainingDiverged",
    "train_model",
    "train_step",
    "evaluate_icon_ce",
    "init_params",
    "param_spec",
    "param_count",
    "save_checkpoint",
    "load_checkpoint",
    "CheckpointError",
]
