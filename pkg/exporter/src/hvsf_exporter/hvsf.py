"""Native HVSF writer/reader implementing the engine's byte contract.

Layout (little-endian, no padding): magic ``HVSF``, u16 version (1), u8
dtype code (1 = float32 LE, 2 = float64 LE, 3 = u8), u8 ndim, ndim x u64
dims, then the row-major channel-last payload.  This module is written
against the documented byte layout, not against the engine's code; the
engine's reader is the conformance oracle in cross-component tests.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np

MAGIC = b"HVSF"
VERSION = 1

_CODES = {np.dtype("float32"): 1, np.dtype("float64"): 2, np.dtype("uint8"): 3}
_WIRE = {1: "<f4", 2: "<f8", 3: "u1"}


class HvsfError(ValueError):
    pass


def write_tensor(path: str | os.PathLike, tensor: np.ndarray) -> None:
    """Atomically write *tensor* (float32/float64/uint8) to *path*."""
    tensor = np.asarray(tensor)
    code = _CODES.get(tensor.dtype)
    if code is None:
        raise HvsfError(f"unsupported dtype {tensor.dtype}")
    header = MAGIC + struct.pack("<HBB", VERSION, code, tensor.ndim)
    header += struct.pack(f"<{tensor.ndim}Q", *tensor.shape)
    payload = np.ascontiguousarray(tensor, dtype=np.dtype(_WIRE[code])).tobytes()
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(prefix=".hvsf-", dir=os.path.dirname(path) or ".")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(header)
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_tensor(path: str | os.PathLike) -> np.ndarray:
    """Read an HVSF file (used for frame ingestion and self-checks)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise HvsfError(f"{path}: bad magic")
    version, code, ndim = struct.unpack_from("<HBB", data, 4)
    if version != VERSION:
        raise HvsfError(f"{path}: unsupported version {version}")
    if code not in _WIRE:
        raise HvsfError(f"{path}: unknown dtype code {code}")
    dims = struct.unpack_from(f"<{ndim}Q", data, 8)
    dtype = np.dtype(_WIRE[code])
    payload = data[8 + 8 * ndim :]
    expected = int(np.prod(dims, dtype=np.uint64)) * dtype.itemsize
    if len(payload) != expected:
        raise HvsfError(f"{path}: payload {len(payload)} bytes, expected {expected}")
    return np.frombuffer(payload, dtype=dtype).reshape(dims).astype(dtype.newbyteorder("="))
