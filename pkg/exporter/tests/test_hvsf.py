"""Byte-contract conformance, cross-checked against the engine's reader."""

import numpy as np
import pytest

import hvsf_exporter.hvsf as exporter_io

engine_io = pytest.importorskip("hvs5m.io")


@pytest.mark.parametrize("dtype", [np.float32, np.float64, np.uint8])
@pytest.mark.parametrize("rank", [1, 2, 3, 4])
def test_engine_reads_exporter_files_bit_exactly(tmp_path, dtype, rank):
    rng = np.random.default_rng(rank)
    shape = tuple(int(s) for s in rng.integers(1, 6, size=rank))
    if dtype is np.uint8:
        tensor = rng.integers(0, 256, size=shape).astype(dtype)
    else:
        tensor = rng.normal(size=shape).astype(dtype)
    path = tmp_path / "x.hvsf"
    exporter_io.write_tensor(path, tensor)
    back = engine_io.read_tensor(path)  # the engine's reader is the oracle
    assert back.dtype == tensor.dtype
    assert back.shape == tensor.shape
    assert back.tobytes() == tensor.tobytes()


def test_exporter_reads_engine_files(tmp_path):
    rng = np.random.default_rng(9)
    tensor = rng.normal(size=(3, 4, 2)).astype(np.float32)
    path = tmp_path / "y.hvsf"
    engine_io.write_tensor(path, tensor)
    back = exporter_io.read_tensor(path)
    assert back.tobytes() == tensor.tobytes()


def test_header_layout_is_byte_exact(tmp_path):
    path = tmp_path / "z.hvsf"
    exporter_io.write_tensor(path, np.zeros((2, 3), dtype=np.float32))
    blob = path.read_bytes()
    assert blob[:4] == b"HVSF"
    assert blob[4:6] == (1).to_bytes(2, "little")  # version
    assert blob[6] == 1  # float32 code
    assert blob[7] == 2  # ndim
    assert blob[8:16] == (2).to_bytes(8, "little")
    assert blob[16:24] == (3).to_bytes(8, "little")
    assert len(blob) == 24 + 2 * 3 * 4


def test_truncation_detected(tmp_path):
    path = tmp_path / "t.hvsf"
    exporter_io.write_tensor(path, np.arange(6, dtype=np.float32))
    path.write_bytes(path.read_bytes()[:-2])
    with pytest.raises(exporter_io.HvsfError):
        exporter_io.read_tensor(path)
