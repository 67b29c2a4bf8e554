"""Parameter initialization and bookkeeping.

Parameters live in a flat name -> ndarray dict with a canonical order
(param_spec) used by the checkpoint format. Embedding tables are stored
(rows, dim) so plain row indexing is a lookup.
"""

from __future__ import annotations

import numpy as np

from .config import ModelConfig

INIT_STD = 0.02


def param_spec(cfg: ModelConfig) -> list[tuple[str, tuple[int, ...]]]:
    """Canonical (name, shape) list; checkpoint tensor order."""
    d, f = cfg.dim, cfg.ffn_dim
    spec = [
        ("text_emb", (cfg.text_vocab_size, d)),
        ("svg_emb", (cfg.svg_vocab, d)),
        ("x_emb", (cfg.coord_rows, d)),
        ("y_emb", (cfg.coord_rows, d)),
        ("special_emb", (2, d)),  # SOS, PAD
        ("pos_emb", (cfg.max_len, d)),
    ]
    for i in range(cfg.layers):
        p = f"layer{i}."
        spec += [
            (p + "ln1_g", (d,)),
            (p + "ln1_b", (d,)),
            (p + "wq", (d, d)),
            (p + "bq", (d,)),
            (p + "wk", (d, d)),
            (p + "bk", (d,)),
            (p + "wv", (d, d)),
            (p + "bv", (d,)),
            (p + "wo", (d, d)),
            (p + "bo", (d,)),
            (p + "ln2_g", (d,)),
            (p + "ln2_b", (d,)),
            (p + "w1", (d, f)),
            (p + "b1", (f,)),
            (p + "w2", (f, d)),
            (p + "b2", (d,)),
        ]
    spec += [
        ("ln_f_g", (d,)),
        ("ln_f_b", (d,)),
        ("head_w", (d, cfg.joint_vocab)),
        ("head_b", (cfg.joint_vocab,)),
    ]
    return spec


def param_count(cfg: ModelConfig) -> int:
    return sum(int(np.prod(shape)) for _, shape in param_spec(cfg))


def init_params(cfg: ModelConfig, rng: np.random.Generator | None = None) -> dict:
    """normal(0, 0.02) weights/embeddings, zero biases, unit LN gains."""
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    dt = cfg.np_dtype
    params: dict[str, np.ndarray] = {}
    for name, shape in param_spec(cfg):
        leaf = name.rsplit(".", 1)[-1]
        if leaf.startswith("b") or leaf.endswith("_b"):
            params[name] = np.zeros(shape, dtype=dt)
        elif leaf.endswith("_g"):
            params[name] = np.ones(shape, dtype=dt)
        else:
            params[name] = rng.normal(0.0, INIT_STD, size=shape).astype(dt)
    return params


def zeros_like_params(params: dict) -> dict:
    return {k: np.zeros_like(v) for k, v in params.items()}


def global_norm(tree: dict) -> float:
    total = 0.0
    for v in tree.values():
        total += float(np.sum(v.astype(np.float64) ** 2))
    return float(np.sqrt(total))


def flatten_params(params: dict, spec) -> np.ndarray:
    return np.concatenate([params[name].ravel() for name, _ in spec])
