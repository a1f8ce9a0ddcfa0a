"""Evaluation metrics, dataset splitting, and multi-run aggregation.

Unlike the training loss, these metrics are exact: no epsilon guards.  A
constant input vector makes the correlation undefined, which is reported via
the ``degenerate`` flag (the scalar functions return NaN in that case).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError


def average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the average of their positions."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def _pearson(a: np.ndarray, b: np.ndarray) -> float:
    ua = a - a.mean()
    ub = b - b.mean()
    denom = np.sqrt((ua * ua).sum()) * np.sqrt((ub * ub).sum())
    if denom == 0.0:
        return float("nan")
    return float((ua * ub).sum() / denom)


def _check_pair(pred, truth) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.ndim != 1 or truth.ndim != 1:
        raise DimensionError("metric inputs must be 1-D vectors")
    if pred.shape != truth.shape:
        raise DimensionError(
            f"length mismatch: {pred.shape[0]} predictions vs {truth.shape[0]} truths"
        )
    if pred.shape[0] < 2:
        raise DimensionError("correlation needs at least 2 values")
    return pred, truth


def srcc(pred, truth) -> float:
    """Spearman rank correlation with average ranks; NaN when a side is constant."""
    pred, truth = _check_pair(pred, truth)
    return _pearson(average_ranks(pred), average_ranks(truth))


def plcc(pred, truth) -> float:
    """Pearson linear correlation on raw values; NaN when a side is constant."""
    pred, truth = _check_pair(pred, truth)
    return _pearson(pred, truth)


@dataclass
class EvalReport:
    srcc: float
    plcc: float
    n_videos: int
    degenerate: bool


def evaluate(pred, truth) -> EvalReport:
    """Both correlations plus a degeneracy flag for constant inputs."""
    s = srcc(pred, truth)
    p = plcc(pred, truth)
    degenerate = bool(np.isnan(s) or np.isnan(p))
    return EvalReport(srcc=s, plcc=p, n_videos=len(np.asarray(pred)), degenerate=degenerate)


def split(
    video_ids: list[str],
    ratios: tuple[float, float, float] = (0.6, 0.2, 0.2),
    seed: int = 0,
) -> tuple[list[str], list[str], list[str]]:
    """Seeded shuffle then partition into train/val/test id lists.

    Validation and test sizes are floored; the remainder goes to training.
    The same seed always produces the same split.
    """
    if len(video_ids) < 5:
        raise ValueError(f"need at least 5 videos to split, got {len(video_ids)}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {ratios}")
    if any(r < 0 for r in ratios):
        raise ValueError(f"split ratios must be non-negative, got {ratios}")
    n = len(video_ids)
    n_val = int(n * ratios[1])
    n_test = int(n * ratios[2])
    n_train = n - n_val - n_test
    order = np.random.default_rng(seed).permutation(n)
    shuffled = [video_ids[i] for i in order]
    return (
        shuffled[:n_train],
        shuffled[n_train : n_train + n_val],
        shuffled[n_train + n_val :],
    )


def aggregate_runs(reports: list[EvalReport]) -> dict[str, tuple[float, float]]:
    """Mean and population std of each metric across runs."""
    if not reports:
        raise ValueError("no reports to aggregate")
    out = {}
    for name in ("srcc", "plcc"):
        values = np.array([getattr(r, name) for r in reports], dtype=np.float64)
        out[name] = (float(values.mean()), float(values.std()))
    return out
