"""Pipeline configuration: defaults, config-file parsing, and overrides.

Config files are flat ``section.key = value`` text (``#`` comments), chosen
for diff-ability and zero dependencies::

    canny.upper = 140
    saliency.h = 100
    temphyst.tau = 12
    training.lr = 1e-5
    ablation.disable_motion = true

Precedence is defaults < config file < command-line overrides; the built-in
defaults are the reference settings (Canny 140/5, threshold 100, hysteresis
window 12 with mixing weight 0.5, learning rate 1e-5 decayed x0.2 every two
epochs, 60/20/20 split).
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field

from .edge import CannyParams
from .errors import ConfigError
from .features import (
    CONTENT_CHANNELS,
    EDGE_CHANNELS,
    MOTION_CHANNELS,
    BackboneSpec,
)
from .head import OptimizerConfig, TempHystConfig


@dataclass(frozen=True)
class SaliencyConfig:
    source: str = "toy"  # "toy" | "file"
    h: float = 100.0
    compare_scaled: bool = True  # compare raw*255 (not raw) against h
    resize: str = "area"  # "area" | "bilinear"
    surround: int = 4  # toy extractor box-blur radius


@dataclass(frozen=True)
class SplitConfig:
    train: float = 0.6
    val: float = 0.2
    test: float = 0.2
    seed: int = 0

    @property
    def ratios(self) -> tuple[float, float, float]:
        return (self.train, self.val, self.test)


@dataclass(frozen=True)
class AblationConfig:
    disable_saliency: bool = False
    disable_content: bool = False
    disable_edge: bool = False
    disable_motion: bool = False
    replace_temphyst_with_fc: bool = False

    def any_enabled(self) -> bool:
        return any(dataclasses.astuple(self))


@dataclass(frozen=True)
class HeadConfig:
    fc_dim: int = 256
    hidden: int = 72
    seed: int = 0


@dataclass
class PipelineConfig:
    canny: CannyParams = field(default_factory=CannyParams)
    saliency: SaliencyConfig = field(default_factory=SaliencyConfig)
    content: BackboneSpec = field(
        default_factory=lambda: BackboneSpec(kind="toy-conv", channels_out=CONTENT_CHANNELS, seed=11)
    )
    edge: BackboneSpec = field(
        default_factory=lambda: BackboneSpec(kind="toy-conv", channels_out=EDGE_CHANNELS, seed=12)
    )
    motion: BackboneSpec = field(
        default_factory=lambda: BackboneSpec(kind="toy-conv", channels_out=MOTION_CHANNELS, seed=13)
    )
    temphyst: TempHystConfig = field(default_factory=TempHystConfig)
    training: OptimizerConfig = field(default_factory=OptimizerConfig)
    split: SplitConfig = field(default_factory=SplitConfig)
    ablation: AblationConfig = field(default_factory=AblationConfig)
    head: HeadConfig = field(default_factory=HeadConfig)
    threads: int = 0  # 0 = use available parallelism

    def spatial_width(self) -> int:
        width = 0
        if not self.ablation.disable_content:
            width += 2 * self.content.channels_out
        if not self.ablation.disable_edge:
            width += 2 * self.edge.channels_out
        return width

    def fused_width(self) -> int:
        width = self.spatial_width()
        if not self.ablation.disable_motion:
            width += 2 * self.motion.channels_out
        return width


def _parse_bool(value: str) -> bool:
    lowered = value.strip().lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {value!r}")


# key -> (section attr, field name, converter)
_KEY_TABLE: dict[str, tuple[str, str, object]] = {
    "canny.upper": ("canny", "upper", float),
    "canny.lower": ("canny", "lower", float),
    "canny.sigma": ("canny", "sigma", float),
    "canny.kernel_size": ("canny", "kernel_size", int),
    "saliency.source": ("saliency", "source", str),
    "saliency.h": ("saliency", "h", float),
    "saliency.compare_scaled": ("saliency", "compare_scaled", _parse_bool),
    "saliency.resize": ("saliency", "resize", str),
    "saliency.surround": ("saliency", "surround", int),
    "backbone.content.kind": ("content", "kind", str),
    "backbone.content.channels": ("content", "channels_out", int),
    "backbone.content.seed": ("content", "seed", int),
    "backbone.content.normalize_input": ("content", "normalize_input", _parse_bool),
    "backbone.edge.kind": ("edge", "kind", str),
    "backbone.edge.channels": ("edge", "channels_out", int),
    "backbone.edge.seed": ("edge", "seed", int),
    "backbone.edge.normalize_input": ("edge", "normalize_input", _parse_bool),
    "backbone.motion.kind": ("motion", "kind", str),
    "backbone.motion.channels": ("motion", "channels_out", int),
    "backbone.motion.seed": ("motion", "seed", int),
    "backbone.motion.normalize_input": ("motion", "normalize_input", _parse_bool),
    "temphyst.tau": ("temphyst", "tau", int),
    "temphyst.gamma": ("temphyst", "gamma", float),
    "training.lr": ("training", "lr", float),
    "training.decay_factor": ("training", "decay_factor", float),
    "training.decay_every": ("training", "decay_every", int),
    "training.epochs": ("training", "epochs", int),
    "training.batch_size": ("training", "batch_size", int),
    "training.seed": ("training", "seed", int),
    "training.standardize_features": ("training", "standardize_features", _parse_bool),
    "training.soft_rank": ("training", "soft_rank", _parse_bool),
    "training.temperature": ("training", "temperature", float),
    "split.train": ("split", "train", float),
    "split.val": ("split", "val", float),
    "split.test": ("split", "test", float),
    "split.seed": ("split", "seed", int),
    "ablation.disable_saliency": ("ablation", "disable_saliency", _parse_bool),
    "ablation.disable_content": ("ablation", "disable_content", _parse_bool),
    "ablation.disable_edge": ("ablation", "disable_edge", _parse_bool),
    "ablation.disable_motion": ("ablation", "disable_motion", _parse_bool),
    "ablation.replace_temphyst_with_fc": ("ablation", "replace_temphyst_with_fc", _parse_bool),
    "head.fc_dim": ("head", "fc_dim", int),
    "head.hidden": ("head", "hidden", int),
    "head.seed": ("head", "seed", int),
    "threads": (None, "threads", int),
}


def parse_config_file(path: str | os.PathLike) -> dict[str, str]:
    """Read ``section.key = value`` lines; unknown keys are rejected."""
    entries: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _KEY_TABLE:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            entries[key] = value
    return entries


def apply_overrides(config: PipelineConfig, entries: dict[str, str]) -> PipelineConfig:
    """Return a new config with *entries* applied on top of *config*."""
    sections: dict[str | None, dict[str, object]] = {}
    for key, raw_value in entries.items():
        if key not in _KEY_TABLE:
            raise ConfigError(f"unknown config key {key!r}")
        section, name, convert = _KEY_TABLE[key]
        try:
            value = convert(raw_value) if isinstance(raw_value, str) else raw_value
        except ConfigError:
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {raw_value!r} ({exc})")
        sections.setdefault(section, {})[name] = value

    updates: dict[str, object] = {}
    for section, fields in sections.items():
        if section is None:
            updates.update(fields)
            continue
        current = getattr(config, section)
        try:
            updates[section] = dataclasses.replace(current, **fields)
        except ValueError as exc:
            raise ConfigError(f"invalid {section} settings: {exc}")
    return dataclasses.replace(config, **updates)


def load_config(
    config_path: str | os.PathLike | None = None,
    overrides: dict[str, str] | None = None,
) -> PipelineConfig:
    """Defaults, then the config file, then explicit overrides."""
    config = PipelineConfig()
    if config_path is not None:
        config = apply_overrides(config, parse_config_file(config_path))
    if overrides:
        config = apply_overrides(config, overrides)
    return config
