"""
Command-line driver: ``dvp-vqa {train,score,distort,evaluate,gradcheck}``.

Results go to stdout as CSV; logging goes to stderr. Exit status is 0 on
success, 1 on runtime failures and 2 on usage or configuration errors.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from pydantic import ValidationError

from app.config import get_settings, load_run_config
from app.exceptions import ConfigurationError, DeepPriorError
from app.logging_config import configure_logging
from app.models.video import ChannelMode
from app.schemas.distortion import DistortionKind, DistortionSpec
from app.schemas.quality import REPORT_HEADER, LogBase
from app.services.distortion_lab import apply_distortion
from app.services.evaluation import evaluate_manifest, write_report
from app.services.gradcheck import run_gradient_suite
from app.services.scoring import restore_sequence, score_video
from app.services.trainer import train_pair
from app.services.video_io import read_sequence, write_sequence
from app.services.weights_io import load_weights, save_weights

logger = logging.getLogger("app.cli")

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


def _size(args: argparse.Namespace):
    return tuple(args.size) if args.size else None


def cmd_train(args: argparse.Namespace) -> int:
    net_cfg, train_cfg = load_run_config(args.config, overrides={"epochs": args.epochs, "seed": args.seed})
    mode = ChannelMode(args.channel_mode)
    original = read_sequence(args.original, channel_mode=mode, size=_size(args))
    distorted = read_sequence(args.distorted, channel_mode=mode, size=_size(args))
    if mode.channels != net_cfg.in_channels:
        net_cfg = net_cfg.model_copy(update={"in_channels": mode.channels, "out_channels": mode.channels})

    restorer, trace = train_pair(original, distorted, net_cfg, train_cfg)
    save_weights(restorer, args.out)
    trace_path = args.trace or args.out.with_name(args.out.name + ".trace.csv")
    trace.write_csv(trace_path)
    logger.info("Loss trace written to %s", trace_path)

    print("final_epoch_mean_loss")
    print(repr(trace.final_epoch_mean()))
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    settings = get_settings()
    restorer = load_weights(args.weights, dtype=settings.compute_dtype)
    mode = ChannelMode.RGB if restorer.config.in_channels == ChannelMode.RGB.channels else ChannelMode.LUMA
    video = read_sequence(args.video, channel_mode=mode, size=_size(args))
    log_base = LogBase(args.log_base or settings.score_log_base)
    score = score_video(
        restorer,
        video,
        video_id=args.video_id or args.video.stem,
        log_base=log_base,
        threads=args.threads,
        peak=settings.psnr_peak,
        mse_floor=settings.mse_floor,
        psnr_floor=settings.psnr_floor,
    )
    if args.restored_out:
        write_sequence(restore_sequence(restorer, video, args.threads), args.restored_out)
        logger.info("Restored frames written to %s", args.restored_out)

    print(REPORT_HEADER)
    print(score.report_line())
    return EXIT_OK


def cmd_distort(args: argparse.Namespace) -> int:
    spec = DistortionSpec(kind=args.kind, severity=args.severity, seed=args.seed if args.seed is not None else 0)
    source = read_sequence(args.input, channel_mode=ChannelMode(args.channel_mode), size=_size(args))
    distorted = apply_distortion(source, spec)
    write_sequence(distorted, args.out)

    print("kind,severity,seed,T")
    print(f"{spec.to_text()},{distorted.frame_count}")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    net_cfg, train_cfg = load_run_config(args.config, overrides={"seed": args.seed})
    report = evaluate_manifest(
        args.manifest,
        net_cfg,
        train_cfg,
        channel_mode=ChannelMode(args.channel_mode),
        size=_size(args),
        threads=args.threads,
    )
    if args.report:
        write_report(report, args.report)
        logger.info("Correlation report written to %s", args.report)

    print("n,lcc,srocc")
    print(report.summary_line())
    return EXIT_OK


def cmd_gradcheck(args: argparse.Namespace) -> int:
    results = run_gradient_suite(seed=args.seed if args.seed is not None else 0)
    print("op,max_rel_error,cells,status")
    for result in results:
        print(result.table_row())
    failed = [result.op for result in results if not result.passed]
    if failed:
        logger.error("Gradient check failed for: %s", ", ".join(failed))
        return EXIT_RUNTIME
    return EXIT_OK


def _add_global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    # Subcommand copies default to SUPPRESS so they keep top-level values.
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--threads", type=int, default=default, help="Thread budget (default: DVP_THREADS or 1)")
    parser.add_argument("--seed", type=int, default=default, help="Global seed")
    parser.add_argument(
        "-v", "--verbose", action="count", default=argparse.SUPPRESS if suppress else 0, help="Debug logging on stderr"
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    _add_global_options(common, suppress=True)

    parser = argparse.ArgumentParser(prog="dvp-vqa", description="Blind video quality assessment with a deep video prior.")
    _add_global_options(parser, suppress=False)
    subparsers = parser.add_subparsers(dest="command", required=True)

    train = subparsers.add_parser("train", parents=[common], help="Fit the restorer on one original/distorted pair")
    train.add_argument("--original", type=Path, required=True)
    train.add_argument("--distorted", type=Path, required=True)
    train.add_argument("--out", type=Path, required=True, help="Weights file to write")
    train.add_argument("--epochs", type=int, default=None)
    train.add_argument("--config", type=Path, default=None, help="Flat key = value run config")
    train.add_argument("--trace", type=Path, default=None, help="Loss-trace CSV (default: <out>.trace.csv)")
    train.add_argument("--size", type=int, nargs=2, metavar=("H", "W"), default=None, help="Frame size of raw YUV input")
    train.add_argument("--channel-mode", choices=[m.value for m in ChannelMode], default=ChannelMode.LUMA.value)
    train.set_defaults(handler=cmd_train)

    score = subparsers.add_parser("score", parents=[common], help="Quality score of a distorted video")
    score.add_argument("--weights", type=Path, required=True)
    score.add_argument("--video", type=Path, required=True)
    score.add_argument("--video-id", default=None, help="Report identifier (default: file stem)")
    score.add_argument("--log-base", choices=[b.value for b in LogBase], default=None)
    score.add_argument("--restored-out", type=Path, default=None, help="Also write the clamped restorations")
    score.add_argument("--size", type=int, nargs=2, metavar=("H", "W"), default=None)
    score.set_defaults(handler=cmd_score)

    distort = subparsers.add_parser("distort", parents=[common], help="Write a synthetically distorted copy")
    distort.add_argument("--in", dest="input", type=Path, required=True)
    distort.add_argument("--out", type=Path, required=True)
    distort.add_argument("--kind", choices=[k.value for k in DistortionKind], required=True)
    distort.add_argument("--severity", type=float, required=True)
    distort.add_argument("--size", type=int, nargs=2, metavar=("H", "W"), default=None)
    distort.add_argument("--channel-mode", choices=[m.value for m in ChannelMode], default=ChannelMode.LUMA.value)
    distort.set_defaults(handler=cmd_distort)

    evaluate = subparsers.add_parser("evaluate", parents=[common], help="Correlate scores with MOS over a manifest")
    evaluate.add_argument("--manifest", type=Path, required=True)
    evaluate.add_argument("--config", type=Path, required=True)
    evaluate.add_argument("--report", type=Path, default=None, help="Per-video CSV report")
    evaluate.add_argument("--size", type=int, nargs=2, metavar=("H", "W"), default=None)
    evaluate.add_argument("--channel-mode", choices=[m.value for m in ChannelMode], default=ChannelMode.LUMA.value)
    evaluate.set_defaults(handler=cmd_evaluate)

    gradcheck = subparsers.add_parser("gradcheck", parents=[common], help="Finite-difference check of the engine")
    gradcheck.set_defaults(handler=cmd_gradcheck)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    settings = get_settings()
    configure_logging("DEBUG" if args.verbose else settings.log_level)
    if args.threads is None:
        args.threads = settings.threads
    if args.threads < 1:
        logger.error("--threads must be >= 1, got %d", args.threads)
        return EXIT_USAGE

    try:
        return args.handler(args)
    except (ConfigurationError, ValidationError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except (DeepPriorError, OSError) as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
