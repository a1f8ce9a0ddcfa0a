"""Dense-tensor primitives used by every stage of the engine.

Arrays are plain ``numpy.ndarray`` objects, row-major, channel-last for
spatial data.  All functions here are pure: inputs are never mutated and the
result is a fresh array, so concurrent callers need no locking.  Every public
operation checks that its output is finite and raises
:class:`~hvs5m.errors.NumericError` otherwise.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, NumericError


def ensure_finite(values: np.ndarray, context: str) -> np.ndarray:
    """Raise NumericError naming *context* if any value is NaN/Inf."""
    if not np.isfinite(values).all():
        raise NumericError(f"non-finite value produced by {context}")
    return values


def channel_attention_multiply(features: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Scale every channel of *features* by a single-channel spatial mask.

    ``features`` has shape (H, W, C) and ``mask`` (H, W, 1); the mask value
    at each position multiplies all C channels there.
    """
    features = np.asarray(features)
    mask = np.asarray(mask)
    if mask.ndim != 3 or mask.shape[-1] != 1:
        raise DimensionError(
            f"attention mask must have shape (H, W, 1), got {mask.shape}"
        )
    if features.ndim != 3 or features.shape[:2] != mask.shape[:2]:
        raise DimensionError(
            f"feature shape {features.shape} does not match mask shape {mask.shape}"
        )
    return ensure_finite(features * mask, "channel attention multiply")


def _check_spatial(features: np.ndarray) -> np.ndarray:
    features = np.asarray(features)
    if features.ndim < 3:
        raise DimensionError(
            f"pooling needs rank >= 3 (…, H, W, C), got shape {features.shape}"
        )
    h, w = features.shape[-3], features.shape[-2]
    if h == 0 or w == 0:
        raise DimensionError(f"empty spatial extent in shape {features.shape}")
    return features


def global_pool_mean(features: np.ndarray) -> np.ndarray:
    """Per-channel mean over the two spatial axes: (…, H, W, C) -> (…, C)."""
    features = _check_spatial(features)
    return ensure_finite(features.mean(axis=(-3, -2)), "global mean pooling")


def global_pool_std(features: np.ndarray) -> np.ndarray:
    """Per-channel population standard deviation over the spatial axes.

    Divides by the number of positions (not positions - 1); a constant
    channel slice pools to exactly 0.
    """
    features = _check_spatial(features)
    return ensure_finite(features.std(axis=(-3, -2)), "global std pooling")


def concat(parts: list[np.ndarray], axis: int = 0) -> np.ndarray:
    """Concatenate along *axis*, validating that all other dims agree."""
    if not parts:
        raise DimensionError("concat needs at least one part")
    arrays = [np.asarray(p) for p in parts]
    first = arrays[0]
    ax = axis if axis >= 0 else first.ndim + axis
    for a in arrays[1:]:
        if a.ndim != first.ndim:
            raise DimensionError(
                f"concat rank mismatch: {first.shape} vs {a.shape}"
            )
        for d in range(first.ndim):
            if d != ax and a.shape[d] != first.shape[d]:
                raise DimensionError(
                    f"concat shape mismatch on axis {d}: {first.shape} vs {a.shape}"
                )
    return ensure_finite(np.concatenate(arrays, axis=axis), "concat")
