"""Tensor interchange files, dataset manifests, and frame ingestion.

HVSF file layout (all integers little-endian, no padding):

    offset  size       field
    0       4          magic ``HVSF``
    4       2          format version, u16 (currently 1)
    6       1          dtype code, u8: 1 = float32 LE, 2 = float64 LE, 3 = u8
    7       1          ndim, u8
    8       8 * ndim   dims, u64 each
    ...     payload    row-major (C-order) values, channel-last layout

The byte layout is the wire contract shared with external feature
exporters; a file written on any machine reads identically on any other.
Writes are atomic (temp file in the target directory, then rename), so a
reader never observes a half-written file.

Manifest grammar (line-oriented, ``#`` comments, paths relative to the
manifest's directory)::

    mos-range: <lo> <hi>

    video: <id>
    frames: <dir of per-frame .hvsf (H, W, 3) u8 tensors>   # or:
    raw: <file> <H> <W> <N>      # planar u8, N frames of 3 H*W planes (R,G,B)
    mos: <float within mos-range>
    saliency: <path.hvsf>        # optional precomputed tensors per branch
    content: <path.hvsf>
    edgefeat: <path.hvsf>
    motion: <path.hvsf>

Records are separated by blank lines; every ``video:`` line starts a new
record.  Duplicate ids, dangling paths, and out-of-range MOS are rejected
with the offending line number.
"""

from __future__ import annotations

import os
import struct
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadMagicError,
    FormatError,
    ManifestError,
    TruncatedFileError,
    UnsupportedVersionError,
)

MAGIC = b"HVSF"
VERSION = 1

_DTYPE_CODES = {
    np.dtype("float32"): 1,
    np.dtype("float64"): 2,
    np.dtype("uint8"): 3,
}
_CODE_DTYPES = {1: np.dtype("<f4"), 2: np.dtype("<f8"), 3: np.dtype("u1")}
_NATIVE = {1: np.dtype("float32"), 2: np.dtype("float64"), 3: np.dtype("uint8")}


def write_tensor(path: str | os.PathLike, tensor: np.ndarray, *, fsync: bool = False) -> None:
    """Write *tensor* to *path* in HVSF format, atomically.

    Supported dtypes: float32, float64, uint8. Other dtypes are rejected
    rather than silently converted.
    """
    tensor = np.asarray(tensor)
    code = _DTYPE_CODES.get(tensor.dtype)
    if code is None:
        raise FormatError(
            f"unsupported dtype {tensor.dtype}; expected float32, float64 or uint8"
        )
    if tensor.ndim < 1 or tensor.ndim > 255:
        raise FormatError(f"unsupported rank {tensor.ndim}")
    header = MAGIC + struct.pack("<HBB", VERSION, code, tensor.ndim)
    header += struct.pack(f"<{tensor.ndim}Q", *tensor.shape)
    payload = np.ascontiguousarray(tensor, dtype=_CODE_DTYPES[code]).tobytes()

    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(prefix=".hvsf-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(payload)
            fh.flush()
            if fsync:
                os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_tensor(path: str | os.PathLike) -> np.ndarray:
    """Read an HVSF file, validating magic, version, dtype and byte length."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 8:
        if not data.startswith(MAGIC[: len(data)]) or len(data) < 4:
            raise BadMagicError(f"{path}: not an HVSF file")
        raise TruncatedFileError(f"{path}: header truncated")
    if data[:4] != MAGIC:
        raise BadMagicError(f"{path}: bad magic {data[:4]!r}")
    version, code, ndim = struct.unpack_from("<HBB", data, 4)
    if version != VERSION:
        raise UnsupportedVersionError(f"{path}: unsupported version {version}")
    if code not in _CODE_DTYPES:
        raise FormatError(f"{path}: unknown dtype code {code}")
    dims_end = 8 + 8 * ndim
    if len(data) < dims_end:
        raise TruncatedFileError(f"{path}: dimension list truncated")
    dims = struct.unpack_from(f"<{ndim}Q", data, 8)
    dtype = _CODE_DTYPES[code]
    expected = int(np.prod(dims, dtype=np.uint64)) * dtype.itemsize
    payload = data[dims_end:]
    if len(payload) < expected:
        raise TruncatedFileError(
            f"{path}: payload has {len(payload)} bytes, expected {expected}"
        )
    if len(payload) > expected:
        raise FormatError(
            f"{path}: {len(payload) - expected} trailing bytes after payload"
        )
    values = np.frombuffer(payload, dtype=dtype).reshape(dims)
    return values.astype(_NATIVE[code], copy=True)


# ---------------------------------------------------------------------------
# Dataset manifests
# ---------------------------------------------------------------------------

_FEATURE_KEYS = ("saliency", "content", "edgefeat", "motion")


@dataclass
class VideoRecord:
    video_id: str
    mos: float
    frames_dir: str | None = None
    raw_file: str | None = None
    raw_shape: tuple[int, int, int] | None = None  # (H, W, N)
    features: dict[str, str] = field(default_factory=dict)


@dataclass
class DatasetManifest:
    mos_range: tuple[float, float]
    records: list[VideoRecord]

    @property
    def video_ids(self) -> list[str]:
        return [r.video_id for r in self.records]

    def record(self, video_id: str) -> VideoRecord:
        for r in self.records:
            if r.video_id == video_id:
                return r
        raise KeyError(video_id)


def _parse_line(line: str, lineno: int) -> tuple[str, str] | None:
    stripped = line.split("#", 1)[0].strip()
    if not stripped:
        return None
    if ":" not in stripped:
        raise ManifestError(f"expected 'key: value', got {stripped!r}", line=lineno)
    key, value = stripped.split(":", 1)
    return key.strip(), value.strip()


def load_manifest(path: str | os.PathLike) -> DatasetManifest:
    """Parse and validate a dataset manifest file."""
    path = os.fspath(path)
    base = os.path.dirname(os.path.abspath(path))

    mos_range: tuple[float, float] | None = None
    records: list[VideoRecord] = []
    seen: dict[str, int] = {}
    current: dict[str, object] | None = None

    def finish(lineno: int) -> None:
        nonlocal current
        if current is None:
            return
        vid = current["video_id"]
        if "mos" not in current:
            raise ManifestError(f"video {vid!r} missing mos", line=current["line"])
        if "frames_dir" not in current and "raw_file" not in current:
            raise ManifestError(
                f"video {vid!r} missing frame source (frames: or raw:)",
                line=current["line"],
            )
        records.append(
            VideoRecord(
                video_id=vid,
                mos=current["mos"],
                frames_dir=current.get("frames_dir"),
                raw_file=current.get("raw_file"),
                raw_shape=current.get("raw_shape"),
                features=current.get("features", {}),
            )
        )
        current = None

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw_line in enumerate(fh, start=1):
            parsed = _parse_line(raw_line, lineno)
            if parsed is None:
                continue
            key, value = parsed
            if key == "mos-range":
                parts = value.split()
                if len(parts) != 2:
                    raise ManifestError("mos-range needs two numbers", line=lineno)
                try:
                    lo, hi = float(parts[0]), float(parts[1])
                except ValueError:
                    raise ManifestError(f"bad mos-range {value!r}", line=lineno)
                if not lo < hi:
                    raise ManifestError("mos-range lower bound must be < upper", line=lineno)
                mos_range = (lo, hi)
                continue
            if key == "video":
                finish(lineno)
                if not value:
                    raise ManifestError("empty video id", line=lineno)
                if value in seen:
                    raise ManifestError(
                        f"duplicate video id {value!r} (first at line {seen[value]})",
                        line=lineno,
                    )
                seen[value] = lineno
                current = {"video_id": value, "line": lineno, "features": {}}
                continue
            if current is None:
                raise ManifestError(f"{key!r} before any video:", line=lineno)
            if key == "frames":
                full = os.path.join(base, value)
                if not os.path.isdir(full):
                    raise ManifestError(f"frames directory not found: {value}", line=lineno)
                current["frames_dir"] = full
            elif key == "raw":
                parts = value.split()
                if len(parts) != 4:
                    raise ManifestError("raw needs: <file> <H> <W> <N>", line=lineno)
                full = os.path.join(base, parts[0])
                if not os.path.isfile(full):
                    raise ManifestError(f"raw video file not found: {parts[0]}", line=lineno)
                try:
                    h, w, n = (int(p) for p in parts[1:])
                except ValueError:
                    raise ManifestError(f"bad raw dimensions {value!r}", line=lineno)
                current["raw_file"] = full
                current["raw_shape"] = (h, w, n)
            elif key == "mos":
                try:
                    current["mos"] = float(value)
                except ValueError:
                    raise ManifestError(f"bad mos {value!r}", line=lineno)
                if mos_range is None:
                    raise ManifestError("mos before mos-range declaration", line=lineno)
                lo, hi = mos_range
                if not lo <= current["mos"] <= hi:
                    raise ManifestError(
                        f"mos {current['mos']} outside declared range [{lo}, {hi}]",
                        line=lineno,
                    )
            elif key in _FEATURE_KEYS:
                full = os.path.join(base, value)
                if not os.path.isfile(full):
                    raise ManifestError(f"{key} file not found: {value}", line=lineno)
                current["features"][key] = full
            else:
                raise ManifestError(f"unknown key {key!r}", line=lineno)
    finish(-1)

    if mos_range is None:
        raise ManifestError("manifest missing mos-range declaration")
    if not records:
        raise ManifestError("manifest declares no videos")
    return DatasetManifest(mos_range=mos_range, records=records)


def load_frames(record: VideoRecord) -> np.ndarray:
    """Load a video's frames as a (N, H, W, 3) uint8 array."""
    if record.frames_dir is not None:
        names = sorted(
            n for n in os.listdir(record.frames_dir) if n.endswith(".hvsf")
        )
        if not names:
            raise ManifestError(f"no .hvsf frames in {record.frames_dir}")
        frames = []
        for name in names:
            frame = read_tensor(os.path.join(record.frames_dir, name))
            if frame.ndim != 3 or frame.shape[2] != 3:
                raise FormatError(
                    f"{name}: frame must be (H, W, 3), got {frame.shape}"
                )
            frames.append(frame)
        stacked = np.stack(frames)
    else:
        h, w, n = record.raw_shape
        expected = n * 3 * h * w
        with open(record.raw_file, "rb") as fh:
            data = fh.read()
        if len(data) != expected:
            raise TruncatedFileError(
                f"{record.raw_file}: {len(data)} bytes, expected {expected}"
            )
        planes = np.frombuffer(data, dtype=np.uint8).reshape(n, 3, h, w)
        stacked = np.moveaxis(planes, 1, -1).copy()
    if stacked.shape[0] == 0:
        raise ManifestError(f"video {record.video_id!r} has no frames")
    return stacked


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------

CHECKPOINT_MANIFEST = "checkpoint.txt"


def save_checkpoint(
    directory: str | os.PathLike,
    tensors: dict[str, np.ndarray],
    meta: dict[str, object],
) -> None:
    """Persist named tensors plus a text manifest to *directory*.

    Each tensor goes to ``<name>.hvsf``; the manifest lists every tensor
    name with its shape followed by scalar metadata entries.
    """
    directory = os.fspath(directory)
    os.makedirs(directory, exist_ok=True)
    lines = []
    for name, tensor in tensors.items():
        write_tensor(os.path.join(directory, f"{name}.hvsf"), tensor)
        dims = "x".join(str(d) for d in tensor.shape)
        lines.append(f"tensor: {name} {dims}")
    for key, value in meta.items():
        lines.append(f"{key}: {value}")
    manifest = "\n".join(lines) + "\n"
    fd, tmp = tempfile.mkstemp(prefix=".ckpt-", dir=directory)
    with os.fdopen(fd, "w", encoding="utf-8") as fh:
        fh.write(manifest)
    os.replace(tmp, os.path.join(directory, CHECKPOINT_MANIFEST))


def load_checkpoint(
    directory: str | os.PathLike,
) -> tuple[dict[str, np.ndarray], dict[str, str]]:
    """Load tensors and metadata written by :func:`save_checkpoint`."""
    directory = os.fspath(directory)
    manifest_path = os.path.join(directory, CHECKPOINT_MANIFEST)
    if not os.path.isfile(manifest_path):
        raise ManifestError(f"no {CHECKPOINT_MANIFEST} in {directory}")
    tensors: dict[str, np.ndarray] = {}
    meta: dict[str, str] = {}
    with open(manifest_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parsed = _parse_line(line, lineno)
            if parsed is None:
                continue
            key, value = parsed
            if key == "tensor":
                name, dims = value.rsplit(" ", 1)
                tensor = read_tensor(os.path.join(directory, f"{name}.hvsf"))
                declared = tuple(int(d) for d in dims.split("x"))
                if tensor.shape != declared:
                    raise ManifestError(
                        f"tensor {name}: file shape {tensor.shape} != declared {declared}",
                        line=lineno,
                    )
                tensors[name] = tensor
            else:
                meta[key] = value
    return tensors, meta
