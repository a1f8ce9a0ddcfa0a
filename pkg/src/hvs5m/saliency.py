"""Saliency-map adjustment, downsampling, and a built-in toy extractor.

Raw saliency maps hold per-pixel attention probabilities in [0, 1].  Most of
their mass sits near 0, which would zero out feature regions that still carry
useful signal, so before use the map is rescaled to pixel range and shifted
by a threshold-dependent offset: values scaled to [0, 255] get +250 below the
threshold and +350 at or above it.  That lifts every position to a usable
weight while keeping a fixed +100 separation between salient and
non-salient regions.  The adjusted map is then downsampled to the feature
grid (1/32 of the frame).
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, InputTooSmallError
from .tensor_ops import ensure_finite

MIN_SIDE = 32

LOW_OFFSET = 250.0
HIGH_OFFSET = 350.0


def adjust_saliency(
    raw: np.ndarray,
    h: float = 100.0,
    *,
    compare_scaled: bool = True,
    resize: str = "area",
    out_hw: tuple[int, int] | None = None,
) -> np.ndarray:
    """Apply the piecewise brightness shift, then downsample to (H/32, W/32).

    *h* is the threshold on the 0-255 scale (must lie in (0, 255)).  With
    ``compare_scaled`` (the default) the threshold is compared against
    ``raw * 255``; the alternative convention compares the raw [0, 1] value
    directly.  ``resize`` is ``"area"`` (average over 32x32 blocks, partial
    blocks at the edges) or ``"bilinear"``; only bilinear supports an
    explicit ``out_hw`` different from (ceil(H/32), ceil(W/32)), which is
    needed when matching feature maps from external backbones whose sides
    are not multiples of 32.
    """
    raw = np.asarray(raw, dtype=np.float64)
    if raw.ndim != 3 or raw.shape[2] != 1:
        raise DimensionError(f"saliency map must be (H, W, 1), got {raw.shape}")
    height, width = raw.shape[:2]
    if height < MIN_SIDE or width < MIN_SIDE:
        raise InputTooSmallError(
            f"saliency map {height}x{width} smaller than {MIN_SIDE}x{MIN_SIDE}"
        )
    if raw.min() < 0.0 or raw.max() > 1.0:
        raise ValueError("raw saliency values must lie in [0, 1]")
    if not 0.0 < h < 255.0:
        raise ValueError(f"threshold h must lie in (0, 255), got {h}")

    scaled = raw * 255.0
    compared = scaled if compare_scaled else raw
    adjusted = np.where(compared < h, scaled + LOW_OFFSET, scaled + HIGH_OFFSET)

    default_hw = (_ceil_div(height, MIN_SIDE), _ceil_div(width, MIN_SIDE))
    target = default_hw if out_hw is None else tuple(out_hw)
    if resize == "area":
        if target != default_hw:
            raise DimensionError(
                f"area resize always yields {default_hw}; use resize='bilinear' "
                f"for target {target}"
            )
        small = _area_downsample(adjusted[:, :, 0], MIN_SIDE)
    elif resize == "bilinear":
        small = _bilinear_resize(adjusted[:, :, 0], target)
    else:
        raise ValueError(f"unknown resize kernel {resize!r}")
    return ensure_finite(small[:, :, np.newaxis], "saliency adjustment")


def raw_adjusted_value(raw_value: float, h: float, *, compare_scaled: bool = True) -> float:
    """Pre-resize adjusted value for a single raw saliency value."""
    scaled = raw_value * 255.0
    compared = scaled if compare_scaled else raw_value
    return scaled + (LOW_OFFSET if compared < h else HIGH_OFFSET)


def toy_saliency(frame: np.ndarray, *, surround: int = 4) -> np.ndarray:
    """Parameter-free stand-in saliency: normalized center-surround contrast.

    Computes per-pixel absolute difference between luminance and a box-blurred
    luminance (window ``2 * surround + 1``, replicate padding), min-max
    normalized to [0, 1].  Deterministic; a constant frame maps to all zeros.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise DimensionError(f"frame must be (H, W, 3), got {frame.shape}")
    height, width = frame.shape[:2]
    if height < MIN_SIDE or width < MIN_SIDE:
        raise InputTooSmallError(
            f"frame {height}x{width} smaller than {MIN_SIDE}x{MIN_SIDE}"
        )
    lum = 0.299 * frame[:, :, 0] + 0.587 * frame[:, :, 1] + 0.114 * frame[:, :, 2]
    blurred = _box_mean(lum, surround)
    contrast = np.abs(lum - blurred)
    lo, hi = contrast.min(), contrast.max()
    if hi - lo <= 0.0:
        normalized = np.zeros_like(contrast)
    else:
        normalized = (contrast - lo) / (hi - lo)
    return normalized[:, :, np.newaxis].astype(np.float32)


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


def _area_downsample(plane: np.ndarray, block: int) -> np.ndarray:
    """Average over block x block tiles; edge tiles may be partial."""
    height, width = plane.shape
    row_starts = np.arange(0, height, block)
    col_starts = np.arange(0, width, block)
    sums = np.add.reduceat(np.add.reduceat(plane, row_starts, axis=0), col_starts, axis=1)
    row_sizes = np.minimum(row_starts + block, height) - row_starts
    col_sizes = np.minimum(col_starts + block, width) - col_starts
    return sums / np.outer(row_sizes, col_sizes)


def _bilinear_resize(plane: np.ndarray, out_hw: tuple[int, int]) -> np.ndarray:
    """Half-pixel-center bilinear resampling to *out_hw*."""
    out_h, out_w = out_hw
    if out_h < 1 or out_w < 1:
        raise DimensionError(f"bilinear target must be positive, got {out_hw}")
    height, width = plane.shape
    src_y = np.clip((np.arange(out_h) + 0.5) * height / out_h - 0.5, 0, height - 1)
    src_x = np.clip((np.arange(out_w) + 0.5) * width / out_w - 0.5, 0, width - 1)
    y0 = np.floor(src_y).astype(int)
    x0 = np.floor(src_x).astype(int)
    y1 = np.minimum(y0 + 1, height - 1)
    x1 = np.minimum(x0 + 1, width - 1)
    wy = (src_y - y0)[:, None]
    wx = (src_x - x0)[None, :]
    top = plane[np.ix_(y0, x0)] * (1 - wx) + plane[np.ix_(y0, x1)] * wx
    bottom = plane[np.ix_(y1, x0)] * (1 - wx) + plane[np.ix_(y1, x1)] * wx
    return top * (1 - wy) + bottom * wy


def _box_mean(plane: np.ndarray, radius: int) -> np.ndarray:
    """Mean over a (2r+1)^2 window with replicate padding, via integral image."""
    size = 2 * radius + 1
    padded = np.pad(plane, radius, mode="edge")
    integral = np.zeros((padded.shape[0] + 1, padded.shape[1] + 1))
    integral[1:, 1:] = padded.cumsum(axis=0).cumsum(axis=1)
    height, width = plane.shape
    total = (
        integral[size : size + height, size : size + width]
        - integral[:height, size : size + width]
        - integral[size : size + height, :width]
        + integral[:height, :width]
    )
    return total / float(size * size)
