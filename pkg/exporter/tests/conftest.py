import numpy as np
import pytest
import torch


class SpatialStub(torch.nn.Module):
    """Stride-32 feature trunk stand-in: avg-pool 32 then 1x1 projection."""

    def __init__(self, channels: int):
        super().__init__()
        self.pool = torch.nn.AvgPool2d(32)
        self.proj = torch.nn.Conv2d(3, channels, 1)

    def forward(self, x):
        return self.proj(self.pool(x))


class SaliencyStub(torch.nn.Module):
    def __init__(self):
        super().__init__()
        self.conv = torch.nn.Conv2d(3, 1, 3, padding=1)

    def forward(self, x):
        return torch.sigmoid(self.conv(x))


class MotionStub(torch.nn.Module):
    """Fast-path stand-in: (1, 3, N, H, W) -> (1, C, N/2, H/32, W/32)."""

    def __init__(self, channels: int):
        super().__init__()
        self.pool = torch.nn.AvgPool3d((2, 32, 32))
        self.proj = torch.nn.Conv3d(3, channels, 1)

    def forward(self, x):
        return self.proj(self.pool(x))


def script_to(path, module):
    torch.jit.script(module.eval()).save(str(path))
    return f"torchscript:{path}"


@pytest.fixture(scope="session")
def stub_specs(tmp_path_factory):
    """TorchScript stand-ins for every branch, saved once per session."""
    torch.manual_seed(0)
    root = tmp_path_factory.mktemp("stubs")
    return {
        "saliency": script_to(root / "saliency.pt", SaliencyStub()),
        "content": script_to(root / "content.pt", SpatialStub(32)),
        "edge-features": script_to(root / "edgefeat.pt", SpatialStub(32)),
        "motion": script_to(root / "motion.pt", MotionStub(16)),
    }


@pytest.fixture()
def frames_dir(tmp_path):
    """Eight synthetic 64x64 frames written as HVSF files."""
    from hvsf_exporter.hvsf import write_tensor

    rng = np.random.default_rng(0)
    directory = tmp_path / "frames"
    directory.mkdir()
    base = rng.integers(0, 200, size=(64, 64, 3)).astype(np.uint8)
    for i in range(8):
        frame = np.clip(base.astype(np.int16) + rng.integers(-20, 20, size=base.shape), 0, 255)
        write_tensor(directory / f"{i:04d}.hvsf", frame.astype(np.uint8))
    return directory
