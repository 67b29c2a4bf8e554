"""Checkpoint container: versioned JSON header + raw little-endian
float32 tensors in the canonical param_spec order.

Layout:  magic "ICSYCKPT" | u32 header length | header JSON | tensor data
The header carries the full model config, the text-vocab hash, and the
tensor name/shape list actually written.
"""

from __future__ import annotations

import json
import struct

import numpy as np

from .config import ModelConfig
from .params import param_spec

MAGIC = b"ICSYCKPT"
FORMAT_VERSION = 1


class CheckpointError(ValueError):
    pass


def save_checkpoint(
    path,
    cfg: ModelConfig,
    params: dict,
    text_vocab_sha256: str,
    extra: dict | None = None,
) -> None:
    spec = param_spec(cfg)
    header = {
        "format": "iconsynth-checkpoint",
        "version": FORMAT_VERSION,
        "config": cfg.to_dict(),
        "text_vocab_sha256": text_vocab_sha256,
        "tensors": [{"name": n, "shape": list(s)} for n, s in spec],
    }
    if extra:
        header["extra"] = extra
    blob = json.dumps(header).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for name, shape in spec:
            arr = params[name]
            if tuple(arr.shape) != tuple(shape):
                raise CheckpointError(f"tensor {name} has shape {arr.shape}, expected {shape}")
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def load_checkpoint(path) -> tuple[ModelConfig, dict, dict]:
    """Returns (config, params, header). Tensors come back in the
    configured compute dtype."""
    with open(path, "rb") as fh:
        magic = fh.read(len(MAGIC))
        if magic != MAGIC:
            raise CheckpointError(f"{path} is not an iconsynth checkpoint")
        (hlen,) = struct.unpack("<I", fh.read(4))
        header = json.loads(fh.read(hlen).decode("utf-8"))
        if header.get("version") != FORMAT_VERSION:
            raise CheckpointError(f"unsupported checkpoint version {header.get('version')}")
        cfg = ModelConfig.from_dict(header["config"])
        params = {}
        for entry in header["tensors"]:
            shape = tuple(entry["shape"])
            count = int(np.prod(shape)) if shape else 1
            buf = fh.read(4 * count)
            if len(buf) != 4 * count:
                raise CheckpointError(f"truncated tensor {entry['name']}")
            arr = np.frombuffer(buf, dtype="<f4").reshape(shape)
            params[entry["name"]] = arr.astype(cfg.np_dtype)
    expected = {n for n, _ in param_spec(cfg)}
    if set(params) != expected:
        raise CheckpointError("checkpoint tensor list does not match the config")
    return cfg, params, header
