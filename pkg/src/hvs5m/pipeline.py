"""End-to-end wiring from frames to fused features and video scores.

Ablation switches change only the wiring they name: disabling saliency
skips the attention multiply, disabling the content or edge branch drops
that branch's statistics from the spatial vector, disabling motion drops
the temporal block (the fusion width shrinks accordingly), and the
hysteresis switch swaps the pooling for a plain mean.  With every switch
off the default pipeline runs unchanged.
"""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import features, head, saliency
from .config import PipelineConfig
from .edge import edge_maps
from .errors import ConfigError, DimensionError
from .io import DatasetManifest, VideoRecord, load_frames, read_tensor


def resolve_threads(config: PipelineConfig) -> int:
    if config.threads > 0:
        return config.threads
    env = os.environ.get("HVS5M_THREADS")
    if env:
        try:
            parsed = int(env)
        except ValueError:
            raise ConfigError(f"HVS5M_THREADS must be an integer, got {env!r}")
        if parsed > 0:
            return parsed
    return os.cpu_count() or 1


def _branch_spec(config: PipelineConfig, branch: str, record: VideoRecord | None) -> features.BackboneSpec:
    spec = getattr(config, branch)
    if spec.kind != "file":
        return spec
    key = {"content": "content", "edge": "edgefeat", "motion": "motion"}[branch]
    if record is None or key not in record.features:
        video = record.video_id if record is not None else "<in-memory>"
        raise ConfigError(
            f"video {video}: backbone kind 'file' for the {branch} branch needs a "
            f"{key}: entry in the manifest"
        )
    return dataclasses.replace(spec, path=record.features[key])


def _raw_saliency(config, record: VideoRecord | None, frames: np.ndarray, index: int) -> np.ndarray:
    if config.saliency.source == "file":
        if record is None or "saliency" not in record.features:
            video = record.video_id if record is not None else "<in-memory>"
            raise ConfigError(
                f"video {video}: saliency.source=file needs a saliency: manifest entry"
            )
        stack = read_tensor(record.features["saliency"])
        if stack.ndim != 4 or stack.shape[0] != frames.shape[0]:
            raise DimensionError(
                f"{record.features['saliency']}: expected (N, H, W, 1) with "
                f"N={frames.shape[0]}, found {stack.shape}"
            )
        return np.asarray(stack[index], dtype=np.float64)
    if config.saliency.source != "toy":
        raise ConfigError(f"unknown saliency source {config.saliency.source!r}")
    return saliency.toy_saliency(frames[index], surround=config.saliency.surround)


def _feature_grid(spec: features.BackboneSpec, frame_hw: tuple[int, int], frame_index: int) -> tuple[int, int]:
    if spec.kind == "file":
        maps = features.backbone_spatial(None, spec, frame_index)
        return maps.shape[0], maps.shape[1]
    return (-(-frame_hw[0] // spec.stride), -(-frame_hw[1] // spec.stride))


def video_fused_features(
    frames: np.ndarray,
    config: PipelineConfig,
    record: VideoRecord | None = None,
    threads: int = 1,
) -> np.ndarray:
    """Fused per-step feature rows for one video: (N // 2, fused width).

    ``frames`` is (N, H, W, 3).  ``record`` supplies per-video feature-file
    paths when any branch uses a file backbone.
    """
    frames = np.asarray(frames)
    if frames.ndim != 4 or frames.shape[-1] != 3:
        raise DimensionError(f"frames must be (N, H, W, 3), got {frames.shape}")
    ablation = config.ablation
    use_content = not ablation.disable_content
    use_edge = not ablation.disable_edge
    use_motion = not ablation.disable_motion
    if not (use_content or use_edge or use_motion):
        raise ConfigError("all feature branches are disabled; nothing to fuse")

    n_frames, height, width = frames.shape[:3]
    content_spec = _branch_spec(config, "content", record) if use_content else None
    edge_spec = _branch_spec(config, "edge", record) if use_edge else None

    def spatial_vector(index: int) -> np.ndarray:
        frame = frames[index]
        mask = None
        if not ablation.disable_saliency:
            grid_spec = content_spec if use_content else edge_spec
            grid = _feature_grid(grid_spec, (height, width), index)
            default_grid = (-(-height // 32), -(-width // 32))
            resize = config.saliency.resize
            if grid != default_grid and resize == "area":
                raise DimensionError(
                    f"feature grid {grid} differs from {default_grid}; set "
                    f"saliency.resize = bilinear to match file-backed features"
                )
            raw = _raw_saliency(config, record, frames, index)
            mask = saliency.adjust_saliency(
                raw,
                config.saliency.h,
                compare_scaled=config.saliency.compare_scaled,
                resize=resize,
                out_hw=grid if resize == "bilinear" else None,
            )
        parts = []
        if use_content:
            mean, std = features.branch_statistics(frame, mask, content_spec, index)
            parts.extend((mean, std))
        if use_edge:
            # file-backed edge features were computed elsewhere; skip Canny then
            edges = edge_maps(frame, config.canny) if edge_spec.kind != "file" else None
            mean, std = features.branch_statistics(edges, mask, edge_spec, index)
            parts.extend((mean, std))
        if not parts:
            return np.empty(0, dtype=np.float32)
        return np.concatenate(parts)

    if use_content or use_edge:
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                spatial = list(pool.map(spatial_vector, range(n_frames)))
        else:
            spatial = [spatial_vector(i) for i in range(n_frames)]
    else:
        spatial = [np.empty(0, dtype=np.float32) for _ in range(n_frames)]

    temporal = None
    if use_motion:
        motion_spec = _branch_spec(config, "motion", record)
        temporal = features.temporal_statistics(frames, motion_spec)
    return features.fuse(spatial, temporal)


def head_pool_config(config: PipelineConfig) -> head.TempHystConfig:
    cfg = config.temphyst
    if config.ablation.replace_temphyst_with_fc:
        cfg = dataclasses.replace(cfg, enabled=False)
    return cfg


def dataset_fused_features(
    manifest: DatasetManifest,
    config: PipelineConfig,
    threads: int = 1,
) -> dict[str, tuple[np.ndarray, float]]:
    """Map video id -> (fused features, mos) for every manifest record."""
    out: dict[str, tuple[np.ndarray, float]] = {}
    for record in manifest.records:
        frames = load_frames(record)
        fused = video_fused_features(frames, config, record, threads=threads)
        out[record.video_id] = (fused, record.mos)
    return out


def score_videos(
    manifest: DatasetManifest,
    config: PipelineConfig,
    params: head.HeadParams,
    threads: int = 1,
) -> dict[str, head.QualityTrace]:
    """Quality traces for every manifest video using trained parameters."""
    pool_cfg = head_pool_config(config)
    traces: dict[str, head.QualityTrace] = {}
    for record in manifest.records:
        frames = load_frames(record)
        fused = video_fused_features(frames, config, record, threads=threads)
        traces[record.video_id] = head.forward(fused, params, pool_cfg)
    return traces
