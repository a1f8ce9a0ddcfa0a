import os

import numpy as np
import pytest

from hvs5m.errors import (
    BadMagicError,
    FormatError,
    ManifestError,
    TruncatedFileError,
    UnsupportedVersionError,
)
from hvs5m.io import (
    load_frames,
    load_manifest,
    read_tensor,
    save_checkpoint,
    load_checkpoint,
    write_tensor,
)


class TestTensorRoundTrip:
    def test_small_float_round_trip(self, tmp_path):
        path = tmp_path / "t.hvsf"
        tensor = np.arange(1.0, 7.0, dtype=np.float32).reshape(2, 3, 1)
        write_tensor(path, tensor)
        back = read_tensor(path)
        assert back.dtype == np.float32
        np.testing.assert_array_equal(back, tensor)

    def test_u8_edge_map_exact(self, tmp_path):
        path = tmp_path / "e.hvsf"
        edge = (np.random.default_rng(0).random((6, 5, 3)) > 0.5).astype(np.uint8) * 255
        write_tensor(path, edge)
        back = read_tensor(path)
        assert back.dtype == np.uint8
        np.testing.assert_array_equal(back, edge)
        assert set(np.unique(back)) <= {0, 255}

    @pytest.mark.parametrize("dtype", [np.float32, np.float64, np.uint8])
    @pytest.mark.parametrize("rank", [1, 2, 3, 4])
    def test_bit_identity_all_dtypes_ranks(self, tmp_path, dtype, rank):
        rng = np.random.default_rng(rank)
        shape = tuple(rng.integers(1, 5, size=rank))
        if dtype is np.uint8:
            tensor = rng.integers(0, 256, size=shape).astype(dtype)
        else:
            tensor = rng.normal(size=shape).astype(dtype)
        path = tmp_path / "x.hvsf"
        write_tensor(path, tensor)
        back = read_tensor(path)
        assert back.dtype == tensor.dtype and back.shape == tensor.shape
        assert back.tobytes() == tensor.tobytes()

    def test_unsupported_dtype_rejected(self, tmp_path):
        with pytest.raises(FormatError):
            write_tensor(tmp_path / "bad.hvsf", np.zeros(3, dtype=np.int32))

    def test_atomic_write_leaves_no_temp_files(self, tmp_path):
        write_tensor(tmp_path / "a.hvsf", np.zeros(4, dtype=np.float32))
        assert sorted(os.listdir(tmp_path)) == ["a.hvsf"]

    def test_fsync_flag(self, tmp_path):
        tensor = np.arange(3, dtype=np.float64)
        write_tensor(tmp_path / "s.hvsf", tensor, fsync=True)
        np.testing.assert_array_equal(read_tensor(tmp_path / "s.hvsf"), tensor)


class TestCorruptionGuards:
    def _write(self, tmp_path):
        path = tmp_path / "t.hvsf"
        write_tensor(path, np.arange(12, dtype=np.float64).reshape(3, 4))
        return path

    def test_truncated_payload(self, tmp_path):
        path = self._write(tmp_path)
        data = path.read_bytes()
        path.write_bytes(data[:-1])
        with pytest.raises(TruncatedFileError):
            read_tensor(path)

    def test_truncated_header(self, tmp_path):
        path = self._write(tmp_path)
        path.write_bytes(path.read_bytes()[:6])
        with pytest.raises(TruncatedFileError):
            read_tensor(path)

    def test_bad_magic(self, tmp_path):
        path = self._write(tmp_path)
        data = bytearray(path.read_bytes())
        data[:4] = b"JUNK"
        path.write_bytes(bytes(data))
        with pytest.raises(BadMagicError):
            read_tensor(path)

    def test_bad_version(self, tmp_path):
        path = self._write(tmp_path)
        data = bytearray(path.read_bytes())
        data[4] = 99
        path.write_bytes(bytes(data))
        with pytest.raises(UnsupportedVersionError):
            read_tensor(path)

    def test_unknown_dtype_code(self, tmp_path):
        path = self._write(tmp_path)
        data = bytearray(path.read_bytes())
        data[6] = 42
        path.write_bytes(bytes(data))
        with pytest.raises(FormatError):
            read_tensor(path)

    def test_trailing_garbage_rejected(self, tmp_path):
        path = self._write(tmp_path)
        path.write_bytes(path.read_bytes() + b"\x00")
        with pytest.raises(FormatError):
            read_tensor(path)


def _write_frames(directory, n=2, h=8, w=8, seed=0):
    rng = np.random.default_rng(seed)
    os.makedirs(directory, exist_ok=True)
    for i in range(n):
        frame = rng.integers(0, 256, size=(h, w, 3)).astype(np.uint8)
        write_tensor(os.path.join(directory, f"{i:04d}.hvsf"), frame)


class TestManifest:
    def _minimal(self, tmp_path, mos="3.0"):
        _write_frames(tmp_path / "frames" / "v1")
        text = f"mos-range: 1.0 5.0\n\nvideo: v1\nframes: frames/v1\nmos: {mos}\n"
        path = tmp_path / "manifest.txt"
        path.write_text(text)
        return path

    def test_minimal_manifest_loads(self, tmp_path):
        manifest = load_manifest(self._minimal(tmp_path))
        assert manifest.video_ids == ["v1"]
        assert manifest.records[0].mos == 3.0
        assert manifest.mos_range == (1.0, 5.0)

    def test_duplicate_id_rejected(self, tmp_path):
        _write_frames(tmp_path / "frames" / "v1")
        text = (
            "mos-range: 1.0 5.0\n\n"
            "video: v1\nframes: frames/v1\nmos: 3.0\n\n"
            "video: v1\nframes: frames/v1\nmos: 2.0\n"
        )
        path = tmp_path / "manifest.txt"
        path.write_text(text)
        with pytest.raises(ManifestError, match="duplicate"):
            load_manifest(path)

    def test_mos_outside_range_rejected(self, tmp_path):
        with pytest.raises(ManifestError, match="outside"):
            load_manifest(self._minimal(tmp_path, mos="9.0"))

    def test_dangling_path_rejected_with_line_number(self, tmp_path):
        text = "mos-range: 1.0 5.0\n\nvideo: v1\nframes: missing/\nmos: 3.0\n"
        path = tmp_path / "manifest.txt"
        path.write_text(text)
        with pytest.raises(ManifestError, match="line 4"):
            load_manifest(path)

    def test_missing_mos_rejected(self, tmp_path):
        _write_frames(tmp_path / "frames" / "v1")
        path = tmp_path / "manifest.txt"
        path.write_text("mos-range: 1.0 5.0\n\nvideo: v1\nframes: frames/v1\n")
        with pytest.raises(ManifestError, match="missing mos"):
            load_manifest(path)

    def test_frames_load_in_name_order(self, tmp_path):
        manifest = load_manifest(self._minimal(tmp_path))
        frames = load_frames(manifest.records[0])
        assert frames.shape == (2, 8, 8, 3)
        assert frames.dtype == np.uint8

    def test_raw_planar_source(self, tmp_path):
        rng = np.random.default_rng(1)
        frames = rng.integers(0, 256, size=(3, 4, 5, 3)).astype(np.uint8)
        planar = np.moveaxis(frames, -1, 1)  # (N, 3, H, W)
        (tmp_path / "clip.raw").write_bytes(planar.tobytes())
        path = tmp_path / "manifest.txt"
        path.write_text(
            "mos-range: 0 10\n\nvideo: v1\nraw: clip.raw 4 5 3\nmos: 5\n"
        )
        manifest = load_manifest(path)
        loaded = load_frames(manifest.records[0])
        np.testing.assert_array_equal(loaded, frames)


class TestCheckpoint:
    def test_round_trip(self, tmp_path):
        tensors = {
            "w": np.random.default_rng(0).normal(size=(3, 4)).astype(np.float32),
            "b": np.zeros(4, dtype=np.float32),
        }
        save_checkpoint(tmp_path / "ckpt", tensors, {"tau": 12, "gamma": 0.5})
        back, meta = load_checkpoint(tmp_path / "ckpt")
        assert meta["tau"] == "12"
        np.testing.assert_array_equal(back["w"], tensors["w"])
        np.testing.assert_array_equal(back["b"], tensors["b"])

    def test_missing_manifest_rejected(self, tmp_path):
        with pytest.raises(ManifestError):
            load_checkpoint(tmp_path)
