"""Command-line front for one-video export jobs."""

from __future__ import annotations

import argparse
import sys

from .export import BRANCHES, ExportError, ExportJob, export
from .hvsf import HvsfError
from .models import ModelError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hvsf-export",
        description=(
            "Run pretrained backbones over one video and dump HVSF feature "
            "files plus a manifest fragment for the quality engine"
        ),
    )
    parser.add_argument("--video", required=True,
                        help="video file, directory of .hvsf frames, or raw planar file")
    parser.add_argument("--id", required=True, dest="video_id", help="video id for file naming")
    parser.add_argument("--out", required=True, dest="target_dir")
    parser.add_argument(
        "--branch",
        action="append",
        choices=BRANCHES,
        default=None,
        help="branch to export (repeatable; default: all with a model given)",
    )
    parser.add_argument("--saliency-model", help="model spec, e.g. torchscript:samnet.pt")
    parser.add_argument("--content-model", help="e.g. convnext_large:weights.pt or torchscript:...")
    parser.add_argument("--edge-model", help="model for edge-map features (often same as content)")
    parser.add_argument("--motion-model", help="e.g. torchscript:slowfast_fast_path.pt")
    parser.add_argument("--stride", type=int, default=1, help="keep every k-th frame")
    parser.add_argument("--raw-shape", nargs=3, type=int, metavar=("H", "W", "N"),
                        help="dimensions for raw planar input")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--raw-edges", action="store_true",
                        help="feed edge maps as raw {0,255} values instead of normalized")
    parser.add_argument("--mos", type=float, help="ground-truth score for the manifest fragment")
    parser.add_argument("--engine-command", default="hvs5m",
                        help="quality-engine CLI used for edge-map extraction")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    specs = {
        "saliency": args.saliency_model,
        "content": args.content_model,
        "edge-features": args.edge_model,
        "motion": args.motion_model,
    }
    branches = tuple(args.branch) if args.branch else tuple(
        b for b in BRANCHES if specs[b] is not None
    )
    job_models = {b: specs[b] for b in branches if specs[b] is not None}
    try:
        job = ExportJob(
            video=args.video,
            video_id=args.video_id,
            target_dir=args.target_dir,
            branches=branches,
            models=job_models,
            frame_stride=args.stride,
            raw_shape=tuple(args.raw_shape) if args.raw_shape else None,
            device=args.device,
            raw_edges=args.raw_edges,
            engine_command=args.engine_command,
            mos=args.mos,
        )
        written = export(job)
    except (ExportError, ModelError, HvsfError, OSError) as exc:
        message = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 2
    for branch, path in sorted(written.items()):
        print(f"{branch}: {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
