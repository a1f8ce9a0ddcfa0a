"""Command-line interface: per-stage commands and the end-to-end runner.

Commands exit 0 on success; any failure prints a single-line
``error: <Type>: <message>`` diagnostic to stderr and exits nonzero.
Settings resolve as defaults < config file < ``--set key=value`` < specific
flags.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import head, io as hvsf_io, metrics, pipeline, report
from .config import load_config
from .edge import edge_maps
from .errors import CheckpointError, EngineError
from .head import load_head_checkpoint, save_head_checkpoint


def _common_options(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="pipeline config file (section.key = value)")
    sub.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a single config key (repeatable)",
    )
    sub.add_argument(
        "--threads",
        type=int,
        default=None,
        help="worker threads for per-frame stages (default: HVS5M_THREADS or all cores)",
    )


def _resolve_config(args: argparse.Namespace, extra: dict[str, str] | None = None):
    overrides: dict[str, str] = {}
    for entry in args.overrides:
        if "=" not in entry:
            raise EngineError(f"--set expects KEY=VALUE, got {entry!r}")
        key, value = entry.split("=", 1)
        overrides[key.strip()] = value.strip()
    if extra:
        overrides.update(extra)
    if args.threads is not None:
        overrides["threads"] = str(args.threads)
    return load_config(args.config, overrides)


def _load_dataset(manifest_path: str, config, threads: int):
    manifest = hvsf_io.load_manifest(manifest_path)
    fused = pipeline.dataset_fused_features(manifest, config, threads=threads)
    return manifest, fused


def _check_head_width(params: head.HeadParams, config) -> None:
    expected = config.fused_width()
    if params.in_dim != expected:
        raise CheckpointError(
            f"checkpoint parameter w_reduce expects fused width {params.in_dim}, "
            f"but the configured pipeline produces {expected}"
        )


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_extract_edges(args: argparse.Namespace) -> int:
    extra = {}
    if args.upper is not None:
        extra["canny.upper"] = str(args.upper)
    if args.lower is not None:
        extra["canny.lower"] = str(args.lower)
    if args.sigma is not None:
        extra["canny.sigma"] = str(args.sigma)
    config = _resolve_config(args, extra)

    names = sorted(n for n in os.listdir(args.input) if n.endswith(".hvsf"))
    if not names:
        raise EngineError(f"no .hvsf frames found in {args.input}")
    os.makedirs(args.output, exist_ok=True)
    for name in names:
        frame = hvsf_io.read_tensor(os.path.join(args.input, name))
        edges = edge_maps(frame, config.canny)
        hvsf_io.write_tensor(os.path.join(args.output, name), edges)
    print(f"wrote {len(names)} edge maps to {args.output}")
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    threads = pipeline.resolve_threads(config)
    params, ckpt_cfg, _meta = load_head_checkpoint(args.checkpoint)
    _check_head_width(params, config)
    # pooling settings come from the checkpoint; ablation may still force mean pooling
    config.temphyst = ckpt_cfg
    manifest = hvsf_io.load_manifest(args.manifest)
    traces = pipeline.score_videos(manifest, config, params, threads=threads)

    os.makedirs(args.output, exist_ok=True)
    score_rows = []
    trace_rows = []
    for record in manifest.records:
        trace = traces[record.video_id]
        score_rows.append(
            [record.video_id, report.fmt(record.mos, 4), report.fmt(trace.video_score)]
        )
        for step in range(len(trace.scores)):
            trace_rows.append(
                [
                    record.video_id,
                    step,
                    report.fmt(float(trace.scores[step])),
                    report.fmt(float(trace.memory[step])),
                    report.fmt(float(trace.anticipation[step])),
                    report.fmt(float(trace.pooled[step])),
                ]
            )
    report.write_table(
        os.path.join(args.output, "scores.csv"),
        ["video_id", "mos", "predicted"],
        score_rows,
    )
    report.write_table(
        os.path.join(args.output, "trace.csv"),
        ["video_id", "step", "score", "memory", "anticipation", "pooled"],
        trace_rows,
    )
    if len(manifest.records) >= 2:
        report.plot_score_scatter(
            [r.mos for r in manifest.records],
            [traces[r.video_id].video_score for r in manifest.records],
            os.path.join(args.output, "mos_vs_predicted.png"),
        )
    report.plot_quality_traces(traces, os.path.join(args.output, "traces.png"))
    print(f"scored {len(manifest.records)} videos; reports in {args.output}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    threads = pipeline.resolve_threads(config)
    manifest, fused = _load_dataset(args.manifest, config, threads)

    train_ids, val_ids, test_ids = metrics.split(
        manifest.video_ids, config.split.ratios, config.split.seed
    )
    train_videos = [fused[v] for v in train_ids]
    val_videos = [fused[v] for v in val_ids]

    params = head.HeadParams.init(
        in_dim=config.fused_width(),
        fc_dim=config.head.fc_dim,
        hidden=config.head.hidden,
        seed=config.head.seed,
    )
    pool_cfg = pipeline.head_pool_config(config)
    best_params, history = head.train(
        train_videos, val_videos, params, pool_cfg, config.training
    )

    save_head_checkpoint(
        args.output,
        best_params,
        pool_cfg,
        seed=config.training.seed,
        epoch=history[-1]["best_epoch"] if history else -1,
    )
    history_rows = [
        [
            h["epoch"],
            f"{h['lr']:.3e}",
            report.fmt(h["train_loss"]),
            report.fmt(h["train_srcc"], 4),
            report.fmt(h["train_plcc"], 4),
            report.fmt(h["val_srcc"], 4),
            report.fmt(h["val_plcc"], 4),
        ]
        for h in history
    ]
    report.write_table(
        os.path.join(args.output, "history.csv"),
        ["epoch", "lr", "train_loss", "train_srcc", "train_plcc", "val_srcc", "val_plcc"],
        history_rows,
    )
    report.plot_training_history(history, os.path.join(args.output, "training_curves.png"))
    last = history[-1]
    print(
        f"trained {len(train_ids)} videos for {len(history)} epochs; "
        f"best epoch {last['best_epoch']}; "
        f"final train SRCC {last['train_srcc']:.4f}, val SRCC {last['val_srcc']:.4f}; "
        f"checkpoint in {args.output} (held-out test ids: {','.join(test_ids)})"
    )
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    threads = pipeline.resolve_threads(config)
    params, ckpt_cfg, _meta = load_head_checkpoint(args.checkpoint)
    _check_head_width(params, config)
    config.temphyst = ckpt_cfg
    manifest, fused = _load_dataset(args.manifest, config, threads)
    pool_cfg = pipeline.head_pool_config(config)

    predictions = {
        vid: head.forward(f, params, pool_cfg).video_score for vid, (f, _) in fused.items()
    }
    reports = []
    rows = []
    for run in range(args.runs):
        seed = config.split.seed + run
        train_ids, val_ids, test_ids = metrics.split(
            manifest.video_ids, config.split.ratios, seed
        )
        pred = [predictions[v] for v in test_ids]
        truth = [fused[v][1] for v in test_ids]
        result = metrics.evaluate(pred, truth)
        reports.append(result)
        sizes = f"{len(train_ids)}/{len(val_ids)}/{len(test_ids)}"
        print(
            f"run {run}: seed={seed} split={sizes} "
            f"srcc={result.srcc:.4f} plcc={result.plcc:.4f}"
            + (" (degenerate)" if result.degenerate else "")
        )
        rows.append(
            [run, seed, len(train_ids), len(val_ids), len(test_ids),
             report.fmt(result.srcc, 4), report.fmt(result.plcc, 4), int(result.degenerate)]
        )
    summary = metrics.aggregate_runs(reports)
    print(
        f"aggregate over {args.runs} runs: "
        f"srcc {summary['srcc'][0]:.4f} +- {summary['srcc'][1]:.4f}, "
        f"plcc {summary['plcc'][0]:.4f} +- {summary['plcc'][1]:.4f}"
    )
    if args.output:
        os.makedirs(args.output, exist_ok=True)
        report.write_table(
            os.path.join(args.output, "runs.csv"),
            ["run", "seed", "n_train", "n_val", "n_test", "srcc", "plcc", "degenerate"],
            rows,
        )
        with open(os.path.join(args.output, "aggregate.txt"), "w", encoding="utf-8") as fh:
            fh.write(
                f"runs: {args.runs}\n"
                f"srcc_mean: {summary['srcc'][0]:.6f}\nsrcc_std: {summary['srcc'][1]:.6f}\n"
                f"plcc_mean: {summary['plcc'][0]:.6f}\nplcc_std: {summary['plcc'][1]:.6f}\n"
            )
        mos_all = [fused[v][1] for v in manifest.video_ids]
        pred_all = [predictions[v] for v in manifest.video_ids]
        report.plot_score_scatter(
            mos_all, pred_all, os.path.join(args.output, "mos_vs_predicted.png")
        )
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hvs5m",
        description="Saliency-guided no-reference video quality engine",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p_edges = subs.add_parser("extract-edges", help="write per-frame Canny edge maps")
    p_edges.add_argument("--in", dest="input", required=True, help="directory of frame .hvsf files")
    p_edges.add_argument("--out", dest="output", required=True, help="output directory")
    p_edges.add_argument("--upper", "--u", type=float, help="strong-edge gradient threshold")
    p_edges.add_argument("--lower", "--l", type=float, help="weak-edge gradient threshold")
    p_edges.add_argument("--sigma", type=float, help="Gaussian blur width")
    _common_options(p_edges)
    p_edges.set_defaults(func=cmd_extract_edges)

    p_score = subs.add_parser("score", help="score manifest videos with a checkpoint")
    p_score.add_argument("--manifest", required=True)
    p_score.add_argument("--checkpoint", required=True)
    p_score.add_argument("--out", dest="output", required=True)
    _common_options(p_score)
    p_score.set_defaults(func=cmd_score)

    p_train = subs.add_parser("train", help="train the quality head on a manifest")
    p_train.add_argument("--manifest", required=True)
    p_train.add_argument("--out", dest="output", required=True, help="checkpoint directory")
    _common_options(p_train)
    p_train.set_defaults(func=cmd_train)

    p_eval = subs.add_parser("evaluate", help="seeded-split evaluation of a checkpoint")
    p_eval.add_argument("--manifest", required=True)
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--runs", type=int, default=10)
    p_eval.add_argument("--out", dest="output", help="directory for CSV/figure reports")
    _common_options(p_eval)
    p_eval.set_defaults(func=cmd_evaluate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (EngineError, OSError, ValueError) as exc:
        message = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
