"""Run configuration: every tunable, loadable from a key-value file with
command-line overrides.

File format: one `section.key = value` per line; `#` starts a comment.
Unknown keys are rejected. The effective configuration is echoed (as
JSON) next to every artifact a command writes.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace

from .dataset.samples import SampleConfig
from .model.config import ModelConfig
from .model.train import TrainConfig


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class StrategyConfig:
    kind: str = "nucleus"
    temperature: float = 1.0
    k: int = 40
    p: float = 0.9
    grammar_constrained: bool = True
    max_icon_tokens: int = 512


@dataclass(frozen=True)
class DataConfig:
    min_freq: int = 1  # text-vocab frequency cutoff
    remove_outer_box: bool = False
    take_first: int = 0  # 0 = keep everything
    raster_resolution: int = 64
    feature_side: int = 16


@dataclass
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    sample: SampleConfig = field(default_factory=SampleConfig)
    strategy: StrategyConfig = field(default_factory=StrategyConfig)
    data: DataConfig = field(default_factory=DataConfig)
    seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


_SECTIONS = {
    "model": ModelConfig,
    "train": TrainConfig,
    "sample": SampleConfig,
    "strategy": StrategyConfig,
    "data": DataConfig,
}


def _coerce(raw: str, typ):
    raw = raw.strip()
    if typ is bool:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}")
    if typ is int:
        return int(raw)
    if typ is float:
        return float(raw)
    return raw


def apply_overrides(cfg: RunConfig, pairs: dict[str, str]) -> RunConfig:
    """Apply dotted-key overrides like {'model.layers': '2'}."""
    staged: dict[str, dict] = {}
    for key, raw in pairs.items():
        if key == "seed":
            cfg.seed = int(raw)
            continue
        if "." not in key:
            raise ConfigError(f"unknown configuration key {key!r}")
        section, name = key.split(".", 1)
        if section not in _SECTIONS:
            raise ConfigError(f"unknown configuration section {section!r}")
        cls = _SECTIONS[section]
        by_name = {f.name: f for f in fields(cls)}
        if name not in by_name:
            raise ConfigError(f"unknown key {name!r} in section {section!r}")
        staged.setdefault(section, {})[name] = _coerce(raw, _field_type(cls, name))
    for section, kv in staged.items():
        current = getattr(cfg, section)
        setattr(cfg, section, replace(current, **kv))
    return cfg


def _field_type(cls, name):
    import typing

    hints = typing.get_type_hints(cls)
    t = hints[name]
    # unwrap Optional[...]
    if typing.get_origin(t) is typing.Union:
        args = [a for a in typing.get_args(t) if a is not type(None)]
        if len(args) == 1:
            t = args[0]
    return t


def parse_config_file(path) -> dict[str, str]:
    pairs: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            pairs[key.strip()] = val.strip()
    return pairs


def load_run_config(path=None, overrides: dict[str, str] | None = None) -> RunConfig:
    cfg = RunConfig()
    if path:
        apply_overrides(cfg, parse_config_file(path))
    if overrides:
        apply_overrides(cfg, overrides)
    return cfg
