"""Export jobs: run branch models over one video, emit HVSF feature files.

Outputs follow the engine's naming convention (`<video_id>.content.hvsf`,
`.edgefeat.hvsf`, `.motion.hvsf`, `.saliency.hvsf`) plus a manifest
fragment referencing them.  Edge maps are produced by the engine's own
``extract-edges`` command (invoked as a subprocess and exchanged via HVSF
files), so exactly one Canny implementation exists in the system.  On any
failure the job removes its partial outputs before re-raising.

Frame preprocessing for pretrained spatial backbones is the standard
ImageNet normalization at native resolution (a documented choice; exact
preprocessing expectations vary by model).  Edge
maps get the same normalization by default so pretrained trunks see inputs
in their expected range; ``raw_edges=True`` feeds {0, 255} values instead.
"""

from __future__ import annotations

import os
import shutil
import subprocess
import tempfile
from dataclasses import dataclass, field

import numpy as np
import torch

from . import hvsf, models

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)

BRANCHES = ("saliency", "content", "edge-features", "motion")

# manifest keys per branch, matching the engine's manifest grammar
_MANIFEST_KEYS = {
    "saliency": "saliency",
    "content": "content",
    "edge-features": "edgefeat",
    "motion": "motion",
}


class ExportError(RuntimeError):
    pass


@dataclass
class ExportJob:
    video: str  # video file, directory of .hvsf frames, or raw planar file
    video_id: str
    target_dir: str
    branches: tuple[str, ...] = BRANCHES
    models: dict[str, str] = field(default_factory=dict)  # branch -> model spec
    frame_stride: int = 1
    raw_shape: tuple[int, int, int] | None = None  # (H, W, N) for raw planar input
    device: str = "cpu"
    raw_edges: bool = False
    engine_command: str = "hvs5m"  # the engine CLI used for edge maps
    mos: float | None = None

    def __post_init__(self) -> None:
        if not self.branches:
            raise ExportError("no branches requested (give at least one model spec)")
        unknown = set(self.branches) - set(BRANCHES)
        if unknown:
            raise ExportError(f"unknown branches: {sorted(unknown)}")
        if self.frame_stride < 1:
            raise ExportError(f"frame_stride must be >= 1, got {self.frame_stride}")
        missing = [b for b in self.branches if b not in self.models]
        if missing:
            raise ExportError(f"no model spec for branches: {missing}")


def load_video_frames(job: ExportJob) -> np.ndarray:
    """Decode the job's video source to (N, H, W, 3) uint8 RGB frames."""
    source = job.video
    if os.path.isdir(source):
        names = sorted(n for n in os.listdir(source) if n.endswith(".hvsf"))
        if not names:
            raise ExportError(f"no .hvsf frames in {source}")
        frames = np.stack([hvsf.read_tensor(os.path.join(source, n)) for n in names])
    elif job.raw_shape is not None:
        h, w, n = job.raw_shape
        data = np.fromfile(source, dtype=np.uint8)
        if data.size != n * 3 * h * w:
            raise ExportError(
                f"{source}: {data.size} bytes, expected {n * 3 * h * w} for raw {job.raw_shape}"
            )
        frames = np.moveaxis(data.reshape(n, 3, h, w), 1, -1)
    else:
        try:
            import cv2
        except ImportError:
            raise ExportError(
                "decoding video files needs opencv-python; pass a frame directory "
                "or a raw planar file instead"
            )
        capture = cv2.VideoCapture(source)
        if not capture.isOpened():
            raise ExportError(f"cannot decode video {source}")
        collected = []
        while True:
            ok, frame_bgr = capture.read()
            if not ok:
                break
            collected.append(cv2.cvtColor(frame_bgr, cv2.COLOR_BGR2RGB))
        capture.release()
        if not collected:
            raise ExportError(f"no frames decoded from {source}")
        frames = np.stack(collected)
    frames = frames[:: job.frame_stride]
    if frames.shape[0] < 2:
        raise ExportError(f"{source}: need at least 2 frames after stride, got {frames.shape[0]}")
    return np.ascontiguousarray(frames)


def _normalized(frames: np.ndarray, device: str) -> torch.Tensor:
    """(N, H, W, 3) u8 -> (N, 3, H, W) float with ImageNet normalization."""
    x = torch.from_numpy(frames.astype(np.float32) / 255.0).permute(0, 3, 1, 2)
    mean = torch.tensor(IMAGENET_MEAN).view(1, 3, 1, 1)
    std = torch.tensor(IMAGENET_STD).view(1, 3, 1, 1)
    return ((x - mean) / std).to(device)


def _engine_edge_maps(job: ExportJob, frames: np.ndarray, workdir: str) -> np.ndarray:
    """Run the engine's extract-edges command over HVSF frame files."""
    frames_dir = os.path.join(workdir, "frames")
    edges_dir = os.path.join(workdir, "edges")
    os.makedirs(frames_dir)
    for i in range(frames.shape[0]):
        hvsf.write_tensor(os.path.join(frames_dir, f"{i:05d}.hvsf"), frames[i])
    command = [job.engine_command, "extract-edges", "--in", frames_dir, "--out", edges_dir]
    result = subprocess.run(command, capture_output=True, text=True)
    if result.returncode != 0:
        raise ExportError(
            f"engine edge extraction failed ({' '.join(command)}): {result.stderr.strip()}"
        )
    names = sorted(n for n in os.listdir(edges_dir) if n.endswith(".hvsf"))
    return np.stack([hvsf.read_tensor(os.path.join(edges_dir, n)) for n in names])


def export(job: ExportJob) -> dict[str, str]:
    """Run all requested branches; returns branch -> written file path.

    Also writes ``<video_id>.fragment.txt``, a manifest fragment referencing
    the emitted files (with the mos line left as a comment unless the job
    carries one).
    """
    frames = load_video_frames(job)
    os.makedirs(job.target_dir, exist_ok=True)
    written: dict[str, str] = {}
    try:
        loaded = {
            branch: models.load_model(job.models[branch], job.device)
            for branch in job.branches
        }

        if "saliency" in job.branches:
            batch = _normalized(frames, job.device)
            maps = models.run_spatial(loaded["saliency"], batch)
            if maps.shape[-1] != 1:
                raise ExportError(
                    f"saliency model must emit 1 channel, got {maps.shape[-1]}"
                )
            stack = maps.cpu().numpy().astype(np.float32)
            if stack.min() < 0.0 or stack.max() > 1.0:
                raise ExportError("saliency values must lie in [0, 1]")
            written["saliency"] = _write(job, "saliency", stack)

        if "content" in job.branches:
            batch = _normalized(frames, job.device)
            features = models.run_spatial(loaded["content"], batch)
            written["content"] = _write(job, "content", features.cpu().numpy().astype(np.float32))

        if "edge-features" in job.branches:
            with tempfile.TemporaryDirectory(prefix="hvsf-edges-") as workdir:
                edge_maps = _engine_edge_maps(job, frames, workdir)
            if job.raw_edges:
                batch = (
                    torch.from_numpy(edge_maps.astype(np.float32))
                    .permute(0, 3, 1, 2)
                    .to(job.device)
                )
            else:
                batch = _normalized(edge_maps, job.device)
            features = models.run_spatial(loaded["edge-features"], batch)
            written["edge-features"] = _write(
                job, "edge-features", features.cpu().numpy().astype(np.float32)
            )

        if "motion" in job.branches:
            clip = _normalized(frames, job.device).permute(1, 0, 2, 3)  # (3, N, H, W)
            features = models.run_motion(loaded["motion"], clip)
            expected_t = frames.shape[0] // 2
            if features.shape[0] != expected_t:
                raise ExportError(
                    f"motion model emitted {features.shape[0]} steps, "
                    f"expected {expected_t} for {frames.shape[0]} frames"
                )
            written["motion"] = _write(job, "motion", features.cpu().numpy().astype(np.float32))

        fragment = _manifest_fragment(job, written)
        fragment_path = os.path.join(job.target_dir, f"{job.video_id}.fragment.txt")
        with open(fragment_path, "w", encoding="utf-8") as fh:
            fh.write(fragment)
        written["fragment"] = fragment_path
    except BaseException:
        for path in written.values():
            if os.path.exists(path):
                os.unlink(path)
        raise
    return written


def _write(job: ExportJob, branch: str, tensor: np.ndarray) -> str:
    path = os.path.join(job.target_dir, f"{job.video_id}.{_MANIFEST_KEYS[branch]}.hvsf")
    hvsf.write_tensor(path, tensor)
    return path


def _manifest_fragment(job: ExportJob, written: dict[str, str]) -> str:
    lines = [f"video: {job.video_id}"]
    if os.path.isdir(job.video):
        lines.append(f"frames: {os.path.abspath(job.video)}")
    elif job.raw_shape is not None:
        h, w, n = job.raw_shape
        lines.append(f"raw: {os.path.abspath(job.video)} {h} {w} {n}")
    else:
        lines.append(f"# source video: {os.path.abspath(job.video)} (decode to frames for the engine)")
    if job.mos is not None:
        lines.append(f"mos: {job.mos}")
    else:
        lines.append("# mos: <required: fill in the ground-truth score>")
    for branch, path in written.items():
        if branch == "fragment":
            continue
        lines.append(f"{_MANIFEST_KEYS[branch]}: {os.path.abspath(path)}")
    return "\n".join(lines) + "\n"
