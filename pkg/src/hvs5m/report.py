"""Delimited report tables and matplotlib figures rendered to files.

Every report is a plain CSV table (stable column order, fixed float
formatting) plus, where it makes sense, a PNG figure rendered with the Agg
backend.  Figures strip the Software metadata chunk so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_PNG_KWARGS = {"metadata": {"Software": None}, "dpi": 110}


def write_table(path: str | os.PathLike, header: list[str], rows: list[list]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def fmt(value: float, digits: int = 6) -> str:
    return f"{value:.{digits}f}"


def plot_training_history(history: list[dict], path: str | os.PathLike) -> None:
    """Loss and correlation curves per epoch."""
    epochs = [h["epoch"] for h in history]
    fig, (ax_loss, ax_corr) = plt.subplots(1, 2, figsize=(9, 3.5))
    ax_loss.plot(epochs, [h["train_loss"] for h in history], label="train loss")
    ax_loss.set_xlabel("epoch")
    ax_loss.set_ylabel("loss")
    ax_loss.legend()
    ax_corr.plot(epochs, [h["train_srcc"] for h in history], label="train SRCC")
    if any(h["val_srcc"] == h["val_srcc"] for h in history):  # has non-NaN
        ax_corr.plot(epochs, [h["val_srcc"] for h in history], label="val SRCC")
    ax_corr.set_xlabel("epoch")
    ax_corr.set_ylabel("SRCC")
    ax_corr.set_ylim(-1.05, 1.05)
    ax_corr.legend()
    fig.tight_layout()
    fig.savefig(path, **_PNG_KWARGS)
    plt.close(fig)


def plot_score_scatter(
    mos: list[float], predicted: list[float], path: str | os.PathLike
) -> None:
    """Ground-truth MOS against predicted video score."""
    fig, ax = plt.subplots(figsize=(4.2, 4.0))
    ax.scatter(mos, predicted, s=18)
    ax.set_xlabel("MOS")
    ax.set_ylabel("predicted score")
    fig.tight_layout()
    fig.savefig(path, **_PNG_KWARGS)
    plt.close(fig)


def plot_quality_traces(
    traces: dict[str, "object"], path: str | os.PathLike, limit: int = 8
) -> None:
    """Per-step pooled quality curves for up to *limit* videos."""
    fig, ax = plt.subplots(figsize=(6.5, 3.5))
    for video_id in list(traces)[:limit]:
        trace = traces[video_id]
        ax.plot(range(len(trace.pooled)), trace.pooled, label=video_id)
    ax.set_xlabel("step")
    ax.set_ylabel("pooled score")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, **_PNG_KWARGS)
    plt.close(fig)
