"""Command line interface.

Subcommands: ``restain`` (translate + stitch a slide), ``eval`` (PSNR/RMSE
and detection metrics), ``histogram`` (condition sidecar), ``seam``
(seam-artifact score of a stitched slide).  Exit codes: 0 on success, 2 on
validation errors, 3 on runtime failures.  Set CC_WSI_LOG to control log
verbosity (DEBUG/INFO/WARNING/ERROR).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import shlex
import sys

from . import chroma, pipeline
from .errors import RuntimeFailure, SeamstainError, ValidationError
from .tiles import TileGeometry

log = logging.getLogger("seamstain")


def parse_geometry(text: str) -> TileGeometry:
    """Parse 'INPUT:OUTPUT', e.g. '256:192'."""
    try:
        input_size, output_size = (int(part) for part in text.split(":"))
    except ValueError as exc:
        raise ValidationError(f"bad geometry {text!r}, expected INPUT:OUTPUT") from exc
    return TileGeometry(input_size=input_size, output_size=output_size)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seamstain", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    restain = sub.add_parser("restain", help="translate a slide tile-by-tile and stitch")
    restain.add_argument("--input", required=True)
    restain.add_argument("--output", required=True)
    restain.add_argument("--translator", choices=pipeline.TRANSLATOR_KINDS, default="identity")
    restain.add_argument("--external-cmd", help="translator subprocess command line")
    restain.add_argument("--condition-image", help="slide whose histogram conditions the color")
    restain.add_argument("--condition-hist", help="precomputed histogram sidecar")
    restain.add_argument("--bins", type=int, default=chroma.DEFAULT_BINS)
    restain.add_argument("--epsilon", type=float, default=chroma.DEFAULT_EPSILON)
    restain.add_argument("--factor", type=int, default=4,
                         help="downsample factor applied to the condition image")
    restain.add_argument("--workers", type=int, default=1)
    restain.add_argument("--geometry", default="256:192")
    restain.add_argument("--sat-min", type=float, default=0.05)
    restain.add_argument("--lum-max", type=float, default=0.95)
    restain.add_argument("--seed", type=int, default=0)
    restain.add_argument("--timeout", type=float, default=60.0)
    restain.add_argument("--truth", help="ground-truth slide for PSNR/RMSE in the report")
    restain.add_argument("--report", help="write the JSON run report here")

    evalp = sub.add_parser("eval", help="PSNR/RMSE and optional detection metrics")
    evalp.add_argument("--synthetic", required=True)
    evalp.add_argument("--truth", required=True)
    evalp.add_argument("--detections-pred")
    evalp.add_argument("--detections-gt")
    evalp.add_argument("--iou-threshold", type=float, default=0.5)
    evalp.add_argument("--report")

    hist = sub.add_parser("histogram", help="compute a condition histogram sidecar")
    hist.add_argument("--image", required=True)
    hist.add_argument("--out", required=True)
    hist.add_argument("--bins", type=int, default=chroma.DEFAULT_BINS)
    hist.add_argument("--epsilon", type=float, default=chroma.DEFAULT_EPSILON)
    hist.add_argument("--factor", type=int, default=4)
    hist.add_argument("--tissue-only", action="store_true",
                      help="mask out background before counting")
    hist.add_argument("--json", dest="json_out", help="also export a JSON debug dump")

    seam = sub.add_parser("seam", help="seam-artifact score of a stitched slide")
    seam.add_argument("--image", required=True)
    seam.add_argument("--geometry", default="256:192")
    seam.add_argument("--report")

    return parser


def _cmd_restain(args: argparse.Namespace) -> int:
    config = pipeline.PipelineConfig(
        geometry=parse_geometry(args.geometry),
        translator=args.translator,
        external_cmd=tuple(shlex.split(args.external_cmd)) if args.external_cmd else None,
        bins=args.bins,
        epsilon=args.epsilon,
        condition_image=args.condition_image,
        condition_hist=args.condition_hist,
        condition_factor=args.factor,
        workers=args.workers,
        sat_min=args.sat_min,
        lum_max=args.lum_max,
        seed=args.seed,
        timeout=args.timeout,
    )
    report = pipeline.run_restain(
        config, args.input, args.output, truth=args.truth, report_path=args.report
    )
    print(json.dumps(report, indent=2))
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    report = pipeline.run_eval(
        args.synthetic,
        args.truth,
        detections_pred=args.detections_pred,
        detections_gt=args.detections_gt,
        iou_threshold=args.iou_threshold,
        report_path=args.report,
    )
    print(json.dumps(report, indent=2))
    return 0


def _cmd_histogram(args: argparse.Namespace) -> int:
    hist = pipeline.run_histogram(
        args.image,
        args.out,
        bins=args.bins,
        factor=args.factor,
        epsilon=args.epsilon,
        tissue_only=args.tissue_only,
        json_out=args.json_out,
    )
    print(json.dumps({"bins": hist.bins, "sum": hist.total(), "out": args.out}))
    return 0


def _cmd_seam(args: argparse.Namespace) -> int:
    report = pipeline.run_seam(
        args.image, geometry=parse_geometry(args.geometry), report_path=args.report
    )
    print(report.to_json())
    return 0


_COMMANDS = {
    "restain": _cmd_restain,
    "eval": _cmd_eval,
    "histogram": _cmd_histogram,
    "seam": _cmd_seam,
}


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=os.environ.get("CC_WSI_LOG", "WARNING").upper())
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as exc:
        log.error("invalid input: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RuntimeFailure, SeamstainError, OSError) as exc:
        log.error("run failed: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
