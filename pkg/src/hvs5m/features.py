"""Backbone feature extraction and pooled spatial/temporal statistics.

Backbones are pluggable behind one contract: either precomputed feature
tensors loaded from interchange files (``kind="file"``) or a built-in toy
convolution stack (``kind="toy-conv"``).  Swapping kinds changes values but
never shapes, so the rest of the pipeline is agnostic to where features
come from.

The toy stack is a fixed stack of 3x3 stride-2 convolutions (one per factor
of 2 in the stride), each followed by bias add and ReLU, with seeded
He-style uniform weights and zero biases.  It exists to exercise the full
dataflow deterministically at desk scale, not to approximate a pretrained
network.  Channel ramp: 8, 16, 32, 64, then ``channels_out``.

Statistics follow the same recipe in each branch: run the backbone, weight
every channel by the adjusted saliency map, then reduce with global mean
and global standard-deviation pooling.
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass

import numpy as np

from . import io as hvsf_io
from .errors import ClipTooShortError, DimensionError
from .tensor_ops import (
    channel_attention_multiply,
    concat,
    global_pool_mean,
    global_pool_std,
)

CONTENT_CHANNELS = 2048
EDGE_CHANNELS = 2048
MOTION_CHANNELS = 256
STRIDE = 32


@dataclass(frozen=True)
class BackboneSpec:
    """How to obtain feature maps for one branch."""

    kind: str = "toy-conv"  # "toy-conv" | "file"
    channels_out: int = CONTENT_CHANNELS
    stride: int = STRIDE
    seed: int = 0
    path: str | None = None
    normalize_input: bool = False  # divide toy-conv inputs by 255

    def __post_init__(self) -> None:
        if self.kind not in ("toy-conv", "file"):
            raise ValueError(f"unknown backbone kind {self.kind!r}")
        if self.channels_out <= 0:
            raise ValueError(f"channels_out must be positive, got {self.channels_out}")
        n_stages = int(round(math.log2(self.stride)))
        if 2**n_stages != self.stride or n_stages < 1:
            raise ValueError(f"stride must be a power of 2 >= 2, got {self.stride}")

    @property
    def n_stages(self) -> int:
        return int(round(math.log2(self.stride)))


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@functools.lru_cache(maxsize=32)
def _toy_weights(
    seed: int, in_channels: int, channels_out: int, n_stages: int
) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Deterministic per-stage (weights, bias) tuples, immutable once built."""
    rng = np.random.default_rng(seed)
    ramp = [8 * 2**i for i in range(n_stages - 1)] + [channels_out]
    stages = []
    current = in_channels
    for out_ch in ramp:
        fan_in = 9 * current
        limit = math.sqrt(6.0 / fan_in)
        weights = rng.uniform(-limit, limit, size=(3, 3, current, out_ch)).astype(
            np.float32
        )
        bias = np.zeros(out_ch, dtype=np.float32)
        weights.setflags(write=False)
        bias.setflags(write=False)
        stages.append((weights, bias))
        current = out_ch
    return tuple(stages)


def _conv_stride2_relu(x: np.ndarray, weights: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """3x3 stride-2 convolution with zero padding 1, then bias and ReLU."""
    height, width, in_ch = x.shape
    out_h, out_w = _ceil_div(height, 2), _ceil_div(width, 2)
    padded = np.pad(x, ((1, 1), (1, 1), (0, 0)))
    patches = np.empty((out_h, out_w, 3, 3, in_ch), dtype=x.dtype)
    for ky in range(3):
        for kx in range(3):
            patches[:, :, ky, kx, :] = padded[
                ky : ky + 2 * out_h - 1 : 2, kx : kx + 2 * out_w - 1 : 2, :
            ]
    flat = patches.reshape(out_h * out_w, 9 * in_ch)
    out = flat @ weights.reshape(9 * in_ch, -1) + bias
    np.maximum(out, 0.0, out=out)
    return out.reshape(out_h, out_w, -1)


def _run_toy_stack(image: np.ndarray, spec: BackboneSpec) -> np.ndarray:
    x = np.asarray(image, dtype=np.float32)
    if spec.normalize_input:
        x = x / np.float32(255.0)
    for weights, bias in _toy_weights(
        spec.seed, image.shape[-1], spec.channels_out, spec.n_stages
    ):
        x = _conv_stride2_relu(x, weights, bias)
    return x


@functools.lru_cache(maxsize=16)
def _cached_tensor(path: str, mtime_ns: int) -> np.ndarray:
    tensor = hvsf_io.read_tensor(path)
    tensor.setflags(write=False)
    return tensor


def _load_feature_file(spec: BackboneSpec) -> np.ndarray:
    if spec.path is None:
        raise DimensionError("file-kind backbone needs a path")
    return _cached_tensor(os.fspath(spec.path), os.stat(spec.path).st_mtime_ns)


def backbone_spatial(
    image: np.ndarray, spec: BackboneSpec, frame_index: int | None = None
) -> np.ndarray:
    """Feature maps for one frame: (H, W, C_in) -> (ceil(H/32), ceil(W/32), C).

    File-kind specs return the stored tensor after shape validation; a rank-4
    stored stack (N, h, w, C) is indexed with *frame_index*.
    """
    if spec.kind == "file":
        stored = _load_feature_file(spec)
        if stored.ndim == 4:
            if frame_index is None:
                raise DimensionError(
                    f"{spec.path}: stored stack is rank 4; frame_index required"
                )
            if not 0 <= frame_index < stored.shape[0]:
                raise DimensionError(
                    f"{spec.path}: frame_index {frame_index} out of range "
                    f"for {stored.shape[0]} frames"
                )
            stored = stored[frame_index]
        if stored.ndim != 3:
            raise DimensionError(
                f"{spec.path}: expected rank-3 feature maps, found shape {stored.shape}"
            )
        if stored.shape[-1] != spec.channels_out:
            raise DimensionError(
                f"{spec.path}: expected {spec.channels_out} channels, "
                f"found {stored.shape[-1]}"
            )
        return np.asarray(stored, dtype=np.float32)
    image = np.asarray(image)
    if image.ndim != 3:
        raise DimensionError(f"backbone input must be rank 3, got {image.shape}")
    return _run_toy_stack(image, spec)


def backbone_motion(clip: np.ndarray, spec: BackboneSpec) -> np.ndarray:
    """Motion feature maps for a clip: (N, H, W, 3) -> (N//2, h, w, C).

    The toy variant differences consecutive frame pairs (2k, 2k+1) and runs
    each difference through the toy stack, a deterministic temporal-change
    proxy; a static clip therefore maps to an all-zero tensor.  Odd trailing
    frames are dropped.
    """
    if spec.kind == "file":
        stored = _load_feature_file(spec)
        if stored.ndim != 4:
            raise DimensionError(
                f"{spec.path}: expected rank-4 motion maps, found shape {stored.shape}"
            )
        if stored.shape[-1] != spec.channels_out:
            raise DimensionError(
                f"{spec.path}: expected {spec.channels_out} channels, "
                f"found {stored.shape[-1]}"
            )
        return np.asarray(stored, dtype=np.float32)
    clip = np.asarray(clip)
    if clip.ndim != 4 or clip.shape[-1] != 3:
        raise DimensionError(f"clip must be (N, H, W, 3), got {clip.shape}")
    n_frames = clip.shape[0]
    if n_frames < 2:
        raise ClipTooShortError(f"motion extraction needs >= 2 frames, got {n_frames}")
    steps = []
    for k in range(n_frames // 2):
        diff = clip[2 * k + 1].astype(np.float32) - clip[2 * k].astype(np.float32)
        steps.append(_run_toy_stack(diff, spec))
    return np.stack(steps)


def branch_statistics(
    image: np.ndarray,
    adjusted_saliency: np.ndarray | None,
    spec: BackboneSpec,
    frame_index: int | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """One branch's (mean, std) channel statistics for a single frame.

    ``adjusted_saliency`` of None skips attention weighting (the saliency
    ablation); otherwise its spatial dims must match the feature maps.
    """
    features = backbone_spatial(image, spec, frame_index)
    if adjusted_saliency is not None:
        adjusted_saliency = np.asarray(adjusted_saliency, dtype=features.dtype)
        if adjusted_saliency.shape[:2] != features.shape[:2]:
            raise DimensionError(
                f"saliency spatial dims {adjusted_saliency.shape[:2]} do not match "
                f"feature spatial dims {features.shape[:2]}"
            )
        features = channel_attention_multiply(features, adjusted_saliency)
    return global_pool_mean(features), global_pool_std(features)


def spatial_statistics(
    frame: np.ndarray,
    edge_map: np.ndarray,
    adjusted_saliency: np.ndarray | None,
    content_spec: BackboneSpec,
    edge_spec: BackboneSpec,
    frame_index: int | None = None,
) -> np.ndarray:
    """Per-frame spatial feature vector: content and edge branch statistics.

    Layout is (content mean, content std, edge mean, edge std); 8192 wide at
    the default 2048-channel branches.
    """
    c_mean, c_std = branch_statistics(frame, adjusted_saliency, content_spec, frame_index)
    e_mean, e_std = branch_statistics(edge_map, adjusted_saliency, edge_spec, frame_index)
    return concat([c_mean, c_std, e_mean, e_std], axis=0)


def temporal_statistics(clip: np.ndarray, spec: BackboneSpec) -> np.ndarray:
    """Per-step motion statistics: (N, H, W, 3) -> (N//2, 2 * channels).

    Global mean and std pooling over the spatial axes of the motion maps,
    concatenated per time step; 512 wide at the default 256 channels.
    """
    motion = backbone_motion(clip, spec)
    return concat([global_pool_mean(motion), global_pool_std(motion)], axis=1)


def fuse(spatial: list[np.ndarray], temporal: np.ndarray | None) -> np.ndarray:
    """Subsample spatial vectors to every second frame and join with temporal.

    Keeps frames 0, 2, 4, ... (the first of each pair), truncated to the
    temporal step count; an unpaired trailing frame is dropped.  With
    ``temporal`` None (motion ablation) the sampled spatial block is
    returned alone.
    """
    if not spatial:
        raise DimensionError("fuse needs at least one spatial vector")
    n_pairs = len(spatial) // 2
    if temporal is not None and temporal.shape[0] != n_pairs:
        raise DimensionError(
            f"{len(spatial)} spatial frames sample to {n_pairs} steps, "
            f"but temporal has {temporal.shape[0]}"
        )
    width = np.asarray(spatial[0]).shape[0]
    sampled = (
        np.stack(spatial[0::2][:n_pairs])
        if n_pairs
        else np.empty((0, width), dtype=np.float32)
    )
    if temporal is None:
        return sampled
    return concat([sampled, np.asarray(temporal)], axis=1)
