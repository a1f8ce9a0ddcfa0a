"""Saliency-guided no-reference video quality engine.

The pipeline runs in two domains and fuses them: per-frame content and edge
features are attention-weighted by an adjusted saliency map and pooled into
spatial statistics, clip-level motion features are pooled into temporal
statistics, and a trainable recurrent head with hysteresis pooling turns the
fused sequence into a single quality score.  Pretrained networks stay behind
a file-based feature interface; built-in toy extractors make the whole
dataflow runnable without them.
"""

from .config import PipelineConfig, load_config
from .edge import CannyParams, canny_channel, edge_maps
from .errors import EngineError
from .features import BackboneSpec, fuse, spatial_statistics, temporal_statistics
from .head import (
    HeadParams,
    OptimizerConfig,
    QualityTrace,
    TempHystConfig,
    backward,
    forward,
    loss,
    train,
)
from .io import load_manifest, read_tensor, write_tensor
from .metrics import EvalReport, aggregate_runs, plcc, split, srcc
from .pipeline import score_videos, video_fused_features
from .saliency import adjust_saliency, toy_saliency

__version__ = "0.1.0"

__all__ = [
    "PipelineConfig",
    "load_config",
    "CannyParams",
    "canny_channel",
    "edge_maps",
    "EngineError",
    "BackboneSpec",
    "fuse",
    "spatial_statistics",
    "temporal_statistics",
    "HeadParams",
    "OptimizerConfig",
    "QualityTrace",
    "TempHystConfig",
    "backward",
    "forward",
    "loss",
    "train",
    "load_manifest",
    "read_tensor",
    "write_tensor",
    "EvalReport",
    "aggregate_runs",
    "plcc",
    "split",
    "srcc",
    "score_videos",
    "video_fused_features",
    "adjust_saliency",
    "toy_saliency",
    "__version__",
]
