"""Per-channel Canny edge detection producing three-channel binary edge maps.

The detector follows the classic pipeline, with every numerically relevant
choice fixed so that results are bit-reproducible:

1. Gaussian blur, default 5x5 kernel with sigma 1.4.  Kernel entries are
   ``exp(-(dx^2 + dy^2) / (2 sigma^2))`` in float64, normalized by their sum
   accumulated in row-major kernel order.  Replicate padding at the borders.
2. 3x3 Sobel gradients (x kernel [[-1,0,1],[-2,0,2],[-1,0,1]], y kernel its
   transpose with +y pointing down), replicate padding.  Both convolutions
   accumulate contributions in row-major kernel order.
3. Gradient magnitude ``sqrt(gx*gx + gy*gy)`` and direction quantized to
   4 bins by slope comparison (no trigonometry): with ax=|gx|, ay=|gy|,
   bin 0 (horizontal gradient) when ay <= (sqrt(2)-1) * ax, bin 90 when
   ay >= (sqrt(2)+1) * ax, otherwise the 45 diagonal when gx*gy > 0 and
   the 135 diagonal when gx*gy < 0.
4. Non-maximum suppression along the quantized direction: a pixel survives
   iff its magnitude is strictly greater than the preceding neighbor's and
   greater than or equal to the following neighbor's (this breaks two-pixel
   plateau ties to one side, so a symmetric step yields a single-pixel
   line).  Neighbors outside the image count as magnitude 0, so border
   pixels are eligible edge pixels.
5. Double threshold on the surviving magnitudes: strong when >= upper,
   weak when in [lower, upper).
6. Hysteresis: weak pixels are kept iff they are 8-connected to a strong
   pixel through a chain of weak/strong pixels.

Edge pixels are written as 255, everything else 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InputTooSmallError

_TAN_LOW = math.sqrt(2.0) - 1.0
_TAN_HIGH = math.sqrt(2.0) + 1.0

# (preceding, following) neighbor offsets per direction bin, as (dy, dx)
_BIN_OFFSETS = {
    0: ((0, -1), (0, 1)),
    45: ((-1, -1), (1, 1)),
    90: ((-1, 0), (1, 0)),
    135: ((-1, 1), (1, -1)),
}


@dataclass(frozen=True)
class CannyParams:
    """Thresholds and blur settings for the edge detector.

    ``upper`` and ``lower`` are compared against the L2 gradient magnitude
    of the blurred channel; defaults are tuned for 0-255 pixel values.
    """

    upper: float = 140.0
    lower: float = 5.0
    sigma: float = 1.4
    kernel_size: int = 5

    def __post_init__(self) -> None:
        if not 0.0 < self.lower < self.upper:
            raise ValueError(
                f"thresholds must satisfy 0 < lower < upper, got "
                f"lower={self.lower}, upper={self.upper}"
            )
        if self.kernel_size < 3 or self.kernel_size % 2 == 0:
            raise ValueError(f"kernel_size must be odd and >= 3, got {self.kernel_size}")
        if self.sigma <= 0.0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


def gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    """Normalized Gaussian kernel; the normalizing sum runs in row-major order."""
    radius = size // 2
    kernel = np.empty((size, size), dtype=np.float64)
    for ky in range(size):
        for kx in range(size):
            dy = ky - radius
            dx = kx - radius
            kernel[ky, kx] = math.exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma))
    total = 0.0
    for ky in range(size):
        for kx in range(size):
            total += kernel[ky, kx]
    return kernel / total


def _convolve_replicate(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """2D correlation with replicate padding, accumulated in kernel order."""
    radius = kernel.shape[0] // 2
    padded = np.pad(plane, radius, mode="edge")
    height, width = plane.shape
    acc = np.zeros((height, width), dtype=np.float64)
    for ky in range(kernel.shape[0]):
        for kx in range(kernel.shape[1]):
            weight = kernel[ky, kx]
            acc += weight * padded[ky : ky + height, kx : kx + width]
    return acc


_SOBEL_X = np.array([[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]])
_SOBEL_Y = np.array([[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]])


def _direction_bins(gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    ax = np.abs(gx)
    ay = np.abs(gy)
    bins = np.empty(gx.shape, dtype=np.int16)
    horizontal = ay <= _TAN_LOW * ax
    vertical = ay >= _TAN_HIGH * ax
    diag_main = gx * gy > 0.0
    bins[:] = np.where(diag_main, 45, 135)
    bins[vertical] = 90
    bins[horizontal] = 0
    return bins


def _shift(mag: np.ndarray, dy: int, dx: int) -> np.ndarray:
    """Magnitude field shifted so element (y, x) holds mag[y+dy, x+dx]; 0 outside."""
    padded = np.pad(mag, 1, mode="constant", constant_values=0.0)
    height, width = mag.shape
    return padded[1 + dy : 1 + dy + height, 1 + dx : 1 + dx + width]


def _non_maximum_suppression(mag: np.ndarray, bins: np.ndarray) -> np.ndarray:
    keep = np.zeros(mag.shape, dtype=bool)
    for bin_id, ((pdy, pdx), (fdy, fdx)) in _BIN_OFFSETS.items():
        in_bin = bins == bin_id
        preceding = _shift(mag, pdy, pdx)
        following = _shift(mag, fdy, fdx)
        keep |= in_bin & (mag > preceding) & (mag >= following)
    return np.where(keep, mag, 0.0)


def _hysteresis(strong: np.ndarray, weak: np.ndarray) -> np.ndarray:
    """Grow the strong set over 8-connected weak pixels until a fixpoint."""
    reachable = strong.copy()
    candidates = weak & ~strong
    while True:
        padded = np.pad(reachable, 1, mode="constant", constant_values=False)
        dilated = np.zeros_like(reachable)
        height, width = reachable.shape
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                if dy == 0 and dx == 0:
                    continue
                dilated |= padded[1 + dy : 1 + dy + height, 1 + dx : 1 + dx + width]
        grown = reachable | (dilated & candidates)
        if np.array_equal(grown, reachable):
            return reachable
        reachable = grown


def canny_channel(channel: np.ndarray, params: CannyParams | None = None) -> np.ndarray:
    """Run the detector on a single (H, W, 1) channel; returns (H, W, 1) uint8."""
    params = params or CannyParams()
    channel = np.asarray(channel, dtype=np.float64)
    if channel.ndim == 3 and channel.shape[2] == 1:
        plane = channel[:, :, 0]
    elif channel.ndim == 2:
        plane = channel
    else:
        raise DimensionError(f"channel must be (H, W, 1) or (H, W), got {channel.shape}")
    height, width = plane.shape
    if height < params.kernel_size or width < params.kernel_size:
        raise InputTooSmallError(
            f"image {height}x{width} smaller than blur kernel "
            f"{params.kernel_size}x{params.kernel_size}"
        )

    blurred = _convolve_replicate(plane, gaussian_kernel(params.kernel_size, params.sigma))
    gx = _convolve_replicate(blurred, _SOBEL_X)
    gy = _convolve_replicate(blurred, _SOBEL_Y)
    mag = np.sqrt(gx * gx + gy * gy)
    suppressed = _non_maximum_suppression(mag, _direction_bins(gx, gy))

    strong = suppressed >= params.upper
    weak = (suppressed >= params.lower) & (suppressed < params.upper)
    edges = _hysteresis(strong, weak)
    return np.where(edges, 255, 0).astype(np.uint8)[:, :, np.newaxis]


def edge_maps(frame: np.ndarray, params: CannyParams | None = None) -> np.ndarray:
    """Per-channel Canny over R, G, B, concatenated to a (H, W, 3) uint8 map.

    Channel c of the output depends only on channel c of the input.
    """
    frame = np.asarray(frame)
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise DimensionError(f"frame must be (H, W, 3), got {frame.shape}")
    channels = [canny_channel(frame[:, :, c], params) for c in range(3)]
    return np.concatenate(channels, axis=2)
