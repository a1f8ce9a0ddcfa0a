"""Branch model loading: TorchScript modules or torchvision trunks.

Model specs are strings:

- ``torchscript:<path>`` loads a scripted/traced module from disk.  This is
  the universal route; SAMNet- and SlowFast-style networks are expected to
  be exported to TorchScript by their own tooling.
- ``resnet50:<state_dict.pt>`` / ``convnext_large:<state_dict.pt>`` build
  the torchvision architecture (no download), load the local state dict,
  and truncate to the final convolutional stage, whose output carries 2048
  (resnet50) or 1536 (convnext_large) channels at 1/32 resolution.

Expected module contracts (channel-first, batch dim 1):

- spatial (content / edge-features / saliency): (1, 3, H, W) in, feature
  maps (1, C, h, w) out; saliency additionally has C = 1 with values in
  [0, 1].
- motion: (1, 3, N, H, W) in, (1, C, T, h, w) out with T = N // 2.

All channel-first to channel-last conversion happens here, never in the
engine.
"""

from __future__ import annotations

import os

import torch


class ModelError(RuntimeError):
    pass


def _require(path: str, spec: str) -> str:
    if not os.path.isfile(path):
        raise ModelError(f"{spec}: weights file not found: {path}")
    return path


def load_model(spec: str, device: str = "cpu") -> torch.nn.Module:
    """Resolve a model spec string to an eval-mode module on *device*."""
    kind, _, path = spec.partition(":")
    if not path:
        raise ModelError(f"model spec needs '<kind>:<path>', got {spec!r}")
    if kind == "torchscript":
        try:
            module = torch.jit.load(_require(path, spec), map_location=device)
        except RuntimeError as exc:
            raise ModelError(f"{spec}: failed to load TorchScript module: {exc}")
    elif kind in ("resnet50", "convnext_large"):
        try:
            import torchvision.models as tvm
        except ImportError:
            raise ModelError("torchvision is required for architecture specs")
        state = torch.load(_require(path, spec), map_location=device)
        if kind == "resnet50":
            net = tvm.resnet50(weights=None)
            net.load_state_dict(state)
            # keep everything up to the stride-32 stage, drop pooling and fc
            module = torch.nn.Sequential(*list(net.children())[:-2])
        else:
            net = tvm.convnext_large(weights=None)
            net.load_state_dict(state)
            module = net.features
    else:
        raise ModelError(f"unknown model kind {kind!r} in {spec!r}")
    module.eval()
    return module.to(device)


@torch.no_grad()
def run_spatial(module: torch.nn.Module, frames: torch.Tensor) -> torch.Tensor:
    """(N, 3, H, W) float batch -> (N, h, w, C) channel-last features."""
    outputs = []
    for i in range(frames.shape[0]):
        out = module(frames[i : i + 1])
        if out.ndim != 4 or out.shape[0] != 1:
            raise ModelError(f"spatial model returned shape {tuple(out.shape)}, expected (1, C, h, w)")
        outputs.append(out[0].permute(1, 2, 0))
    return torch.stack(outputs)


@torch.no_grad()
def run_motion(module: torch.nn.Module, clip: torch.Tensor) -> torch.Tensor:
    """(3, N, H, W) float clip -> (T, h, w, C) channel-last features."""
    out = module(clip.unsqueeze(0))
    if out.ndim != 5 or out.shape[0] != 1:
        raise ModelError(f"motion model returned shape {tuple(out.shape)}, expected (1, C, T, h, w)")
    return out[0].permute(1, 2, 3, 0)
