"""Seeded synthetic videos and desk-scale datasets for demos and tests.

Videos are smooth random textures with per-frame drift and noise, so the
content, edge, and motion branches all see non-trivial signal.  Ground-truth
scores come from a fixed random linear functional of each video's pooled
features (standardized across the dataset) plus Gaussian noise, which gives
the quality head something learnable without any real data.
"""

from __future__ import annotations

import os

import numpy as np

from . import io as hvsf_io
from .config import PipelineConfig
from .pipeline import video_fused_features


def make_video(
    n_frames: int = 8,
    size: int = 64,
    seed: int = 0,
    *,
    drift: float = 2.0,
    noise: float = 8.0,
    contrast: float = 1.0,
    brightness: float = 0.0,
) -> np.ndarray:
    """One synthetic (N, size, size, 3) uint8 clip with smooth moving texture.

    ``contrast`` and ``brightness`` apply a global tone transform, ``noise``
    sets per-frame texture roughness, ``drift`` the motion speed.
    """
    rng = np.random.default_rng(seed)
    coarse = rng.uniform(0.0, 255.0, size=(3, size // 8 + 2, size // 8 + 2))
    ys = np.linspace(0, coarse.shape[1] - 2, size)
    xs = np.linspace(0, coarse.shape[2] - 2, size)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]

    def upsample(plane: np.ndarray, shift_y: float, shift_x: float) -> np.ndarray:
        yy = np.clip(y0 + int(shift_y), 0, plane.shape[0] - 2)
        xx = np.clip(x0 + int(shift_x), 0, plane.shape[1] - 2)
        top = plane[np.ix_(yy, xx)] * (1 - wx) + plane[np.ix_(yy, xx + 1)] * wx
        bottom = plane[np.ix_(yy + 1, xx)] * (1 - wx) + plane[np.ix_(yy + 1, xx + 1)] * wx
        return top * (1 - wy) + bottom * wy

    frames = np.empty((n_frames, size, size, 3), dtype=np.uint8)
    velocity = rng.uniform(-drift, drift, size=2)
    for t in range(n_frames):
        shift = velocity * t
        for ch in range(3):
            plane = upsample(coarse[ch], shift[0], shift[1])
            plane = plane + rng.normal(0.0, noise, size=plane.shape)
            plane = (plane - 128.0) * contrast + 128.0 + brightness
            frames[t, :, :, ch] = np.clip(plane, 0, 255).astype(np.uint8)
    return frames


def make_videos(
    n_videos: int = 20, n_frames: int = 8, size: int = 64, seed: int = 7
) -> list[np.ndarray]:
    """A population of clips varying in tone, roughness, and motion speed.

    The per-video global factors give the feature distribution a few strong
    variance directions, which is what makes the synthetic quality targets
    below recoverable from small training splits.
    """
    rng = np.random.default_rng(seed)
    videos = []
    for i in range(n_videos):
        videos.append(
            make_video(
                n_frames,
                size,
                seed=seed * 1000 + i,
                drift=float(rng.uniform(0.5, 3.0)),
                noise=float(rng.uniform(2.0, 16.0)),
                contrast=float(rng.uniform(0.4, 1.6)),
                brightness=float(rng.uniform(-40.0, 40.0)),
            )
        )
    return videos


def linear_mos(
    fused_list: list[np.ndarray],
    seed: int = 0,
    noise_sigma: float = 0.05,
    components: int | None = 2,
) -> np.ndarray:
    """Scores from a fixed random linear functional of time-pooled features.

    With ``components`` set, the functional's direction is drawn inside the
    span of the top principal components of the pooled features, so the
    target reflects the dataset's dominant factors and stays recoverable
    from a small training split; ``components=None`` draws a fully random
    direction instead.  Raw outputs are standardized across the dataset
    before adding N(0, noise_sigma^2) noise, so the noise scale is relative
    to a unit-variance target.
    """
    rng = np.random.default_rng(seed)
    pooled = np.stack([np.asarray(f, dtype=np.float64).mean(axis=0) for f in fused_list])
    centered = pooled - pooled.mean(axis=0)
    if components is None:
        weights = rng.standard_normal(pooled.shape[1])
    else:
        _, _, vt = np.linalg.svd(centered, full_matrices=False)
        k = min(components, vt.shape[0])
        weights = vt[:k].T @ rng.standard_normal(k)
    raw = centered @ weights
    spread = raw.std()
    if spread <= 0:
        raise ValueError("pooled features are constant across videos")
    standardized = (raw - raw.mean()) / spread
    return standardized + rng.normal(0.0, noise_sigma, size=len(fused_list))


def build_feature_dataset(
    config: PipelineConfig,
    n_videos: int = 20,
    n_frames: int = 8,
    size: int = 64,
    seed: int = 7,
    noise_sigma: float = 0.05,
    components: int | None = 2,
) -> list[tuple[np.ndarray, float]]:
    """In-memory (fused features, mos) pairs ready for head training."""
    videos = make_videos(n_videos, n_frames, size, seed)
    fused = [video_fused_features(v, config) for v in videos]
    mos = linear_mos(fused, seed=seed + 1, noise_sigma=noise_sigma, components=components)
    return list(zip(fused, (float(m) for m in mos)))


def write_dataset(
    directory: str | os.PathLike,
    n_videos: int = 6,
    n_frames: int = 8,
    size: int = 64,
    seed: int = 7,
    mos_values: list[float] | None = None,
    config: PipelineConfig | None = None,
) -> str:
    """Write frames plus a manifest under *directory*; returns the manifest path.

    Unless explicit ``mos_values`` are given, scores come from the seeded
    feature functional (:func:`linear_mos`) mapped into [1, 5], so the
    dataset is actually learnable.  Feature extraction for the functional
    uses *config* (default: desk-scale 8/8/4 channel widths).
    """
    from .config import load_config

    directory = os.fspath(directory)
    os.makedirs(directory, exist_ok=True)
    videos = make_videos(n_videos, n_frames, size, seed)
    if mos_values is None:
        if config is None:
            config = load_config(
                None,
                {
                    "backbone.content.channels": "8",
                    "backbone.edge.channels": "8",
                    "backbone.motion.channels": "4",
                },
            )
        fused = [video_fused_features(v, config) for v in videos]
        target = linear_mos(fused, seed=seed + 1, noise_sigma=0.05)
        mos_values = list(np.clip(3.0 + 1.2 * target, 0.2, 5.8))
    if len(mos_values) != n_videos:
        raise ValueError(f"need {n_videos} mos values, got {len(mos_values)}")
    lines = ["mos-range: 0.0 6.0", ""]
    for i in range(n_videos):
        video_id = f"clip{i:03d}"
        frame_dir = os.path.join(directory, "frames", video_id)
        os.makedirs(frame_dir, exist_ok=True)
        for t in range(n_frames):
            hvsf_io.write_tensor(os.path.join(frame_dir, f"{t:04d}.hvsf"), videos[i][t])
        lines.append(f"video: {video_id}")
        lines.append(f"frames: frames/{video_id}")
        lines.append(f"mos: {mos_values[i]:.4f}")
        lines.append("")
    manifest_path = os.path.join(directory, "manifest.txt")
    with open(manifest_path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines))
    return manifest_path
