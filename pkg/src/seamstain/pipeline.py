"""End-to-end orchestration: tile, condition, translate in parallel, stitch.

Tile translation fans out across a bounded thread pool; results are keyed by
(row, col) so the stitched output is byte-identical for any worker count.
Output files are written to a temp file and atomically renamed, so a failed
run never leaves a corrupt slide behind.
"""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
import time
from concurrent.futures import FIRST_EXCEPTION, ThreadPoolExecutor, wait
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path
from typing import Callable

from . import chroma
from .consistency import SeamReport, seam_discontinuity
from .errors import RuntimeFailure, ValidationError
from .image import (
    DEFAULT_LUM_MAX,
    DEFAULT_SAT_MIN,
    RasterImage,
    compute_tissue_mask,
    downsample,
    load_image,
    save_image,
)
from .metrics import (
    load_detections,
    match_and_score,
    metrics_to_dict,
    psnr,
    rmse,
)
from .rng import derive_seed
from .tiles import TileGeometry, extract_tile, plan_tiles, stitch
from .translate import (
    ChromaMatchConfig,
    ExternalTranslator,
    TranslationRequest,
    TranslationResult,
    translate_chroma_match,
    translate_identity,
)

log = logging.getLogger("seamstain.pipeline")

REPORT_VERSION = 1

TRANSLATOR_KINDS = ("identity", "chroma", "external")


@dataclass(frozen=True)
class PipelineConfig:
    geometry: TileGeometry = TileGeometry()
    translator: str = "identity"
    external_cmd: tuple[str, ...] | None = None
    bins: int = chroma.DEFAULT_BINS
    epsilon: float = chroma.DEFAULT_EPSILON
    condition_image: str | None = None
    condition_hist: str | None = None
    condition_factor: int = 4
    workers: int = 1
    sat_min: float = DEFAULT_SAT_MIN
    lum_max: float = DEFAULT_LUM_MAX
    seed: int = 0
    timeout: float = 60.0

    def __post_init__(self) -> None:
        if self.translator not in TRANSLATOR_KINDS:
            raise ValidationError(f"unknown translator {self.translator!r}")
        if self.workers < 1:
            raise ValidationError(f"worker count must be >= 1, got {self.workers}")
        if self.condition_factor < 1:
            raise ValidationError(f"condition factor must be >= 1, got {self.condition_factor}")
        if self.condition_image and self.condition_hist:
            raise ValidationError("give exactly one condition source (image or sidecar)")
        if self.translator == "chroma" and not (self.condition_image or self.condition_hist):
            raise ValidationError("chroma translator needs a condition source")
        if self.translator == "external" and not self.external_cmd:
            raise ValidationError("external translator needs --external-cmd")


def load_condition(config: PipelineConfig) -> chroma.ChromaHistogram | None:
    """Resolve the color condition: sidecar takes precedence over image."""
    if config.condition_hist:
        hist = chroma.load_sidecar(config.condition_hist)
    elif config.condition_image:
        img = load_image(config.condition_image)
        img = downsample(img, config.condition_factor)
        hist = chroma.compute_histogram(img, bins=config.bins, epsilon=config.epsilon)
    else:
        return None
    chroma.validate_condition(hist)
    return hist


def _psnr_json(value: float) -> float | str:
    return "infinite" if math.isinf(value) else value


def _atomic_save(img: RasterImage, path: Path) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=path.suffix)
    os.close(fd)
    try:
        save_image(img, tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_report(report: dict, report_path: str | Path | None) -> None:
    if report_path is not None:
        Path(report_path).write_text(json.dumps(report, indent=2))


def run_restain(
    config: PipelineConfig,
    input_slide: str | Path,
    output_slide: str | Path,
    truth: str | Path | None = None,
    report_path: str | Path | None = None,
) -> dict:
    """Translate a slide tile-by-tile and stitch the center crops back together.

    Returns (and optionally writes) a JSON-ready run report.  On a mid-run
    failure the report records which tiles completed and the output file is
    not touched.
    """
    t_start = time.monotonic()
    slide = load_image(input_slide)
    ctx = config.geometry.context
    if slide.width <= ctx or slide.height <= ctx:
        raise ValidationError(
            f"slide {slide.width}x{slide.height} too small for context ring {ctx}"
        )
    condition = load_condition(config)
    plan = plan_tiles(slide.width, slide.height, config.geometry)
    log.info(
        "restain %s: %dx%d slide, %dx%d tiles, translator=%s, workers=%d",
        input_slide, slide.width, slide.height, plan.rows, plan.cols,
        config.translator, config.workers,
    )

    external: ExternalTranslator | None = None
    translate: Callable[[TranslationRequest], TranslationResult]
    if config.translator == "identity":
        translate = translate_identity
    elif config.translator == "chroma":
        translate = partial(
            translate_chroma_match,
            config=ChromaMatchConfig(sat_min=config.sat_min, lum_max=config.lum_max),
        )
    else:
        external = ExternalTranslator(list(config.external_cmd or ()), timeout=config.timeout)
        translate = external.translate

    core = config.geometry.output_size
    margin = (config.geometry.input_size - core) // 2

    def run_tile(row: int, col: int) -> tuple[int, int, RasterImage, float]:
        t0 = time.monotonic()
        tile_id = row * plan.cols + col
        tile = extract_tile(slide, plan, row, col)
        req = TranslationRequest(
            tile_id=tile_id,
            tile=tile,
            condition=condition,
            noise_seed=derive_seed(config.seed, tile_id),
        )
        result = translate(req)
        if result.tile.width != tile.width or result.tile.height != tile.height:
            raise RuntimeFailure(
                f"translator changed tile dimensions: {result.tile.width}x{result.tile.height}"
            )
        center = result.tile.array[margin : margin + core, margin : margin + core]
        return row, col, RasterImage(center.copy()), (time.monotonic() - t0) * 1000.0

    cores: dict[tuple[int, int], RasterImage] = {}
    timings: dict[tuple[int, int], float] = {}
    failure: tuple[int, int, BaseException] | None = None
    try:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            futures = {
                pool.submit(run_tile, ref.row, ref.col): (ref.row, ref.col) for ref in plan
            }
            done, not_done = wait(futures, return_when=FIRST_EXCEPTION)
            for fut in done:
                exc = fut.exception()
                if exc is not None:
                    if failure is None:
                        failure = (*futures[fut], exc)
                    continue
                row, col, core_img, ms = fut.result()
                cores[(row, col)] = core_img
                timings[(row, col)] = ms
            for fut in not_done:
                fut.cancel()
    finally:
        if external is not None:
            external.close()

    if failure is not None:
        row, col, exc = failure
        report = {
            "report_version": REPORT_VERSION,
            "status": "failed",
            "input": str(input_slide),
            "translator": config.translator,
            "error": {"tile": [row, col], "message": str(exc)},
            "completed_tiles": sorted([list(k) for k in cores]),
        }
        _write_report(report, report_path)
        raise RuntimeFailure(f"tile ({row},{col}): {exc}") from exc

    stitched = stitch([(r, c, img) for (r, c), img in cores.items()], plan)
    _atomic_save(stitched, Path(output_slide))

    seam = seam_discontinuity(stitched, plan)
    report = {
        "report_version": REPORT_VERSION,
        "status": "ok",
        "input": str(input_slide),
        "output": str(output_slide),
        "translator": config.translator,
        "geometry": {
            "input_size": config.geometry.input_size,
            "output_size": config.geometry.output_size,
        },
        "tiles": {"rows": plan.rows, "cols": plan.cols, "count": plan.tile_count},
        "tile_timings_ms": [
            round(timings[(r, c)], 3) for r in range(plan.rows) for c in range(plan.cols)
        ],
        "seam": json.loads(seam.to_json()),
        "elapsed_s": round(time.monotonic() - t_start, 3),
    }
    if truth is not None:
        truth_img = load_image(truth)
        report["rmse"] = rmse(stitched, truth_img)
        report["psnr"] = _psnr_json(psnr(stitched, truth_img))
    _write_report(report, report_path)
    return report


def run_eval(
    synthetic: str | Path,
    truth: str | Path,
    detections_pred: str | Path | None = None,
    detections_gt: str | Path | None = None,
    iou_threshold: float = 0.5,
    report_path: str | Path | None = None,
) -> dict:
    """Image-quality metrics plus optional detection P/R/F1."""
    a = load_image(synthetic)
    b = load_image(truth)
    report: dict = {
        "report_version": REPORT_VERSION,
        "rmse": rmse(a, b),
        "psnr": _psnr_json(psnr(a, b)),
    }
    if (detections_pred is None) != (detections_gt is None):
        raise ValidationError("detection evaluation needs both --detections-pred and --detections-gt")
    if detections_pred is not None and detections_gt is not None:
        preds = load_detections(detections_pred)
        gts = load_detections(detections_gt)
        report["detection"] = metrics_to_dict(match_and_score(preds, gts, iou_threshold))
    _write_report(report, report_path)
    return report


def run_histogram(
    image: str | Path,
    out: str | Path,
    bins: int = chroma.DEFAULT_BINS,
    factor: int = 4,
    epsilon: float = chroma.DEFAULT_EPSILON,
    tissue_only: bool = False,
    json_out: str | Path | None = None,
) -> chroma.ChromaHistogram:
    """Compute a slide's condition histogram and write the binary sidecar."""
    img = downsample(load_image(image), factor)
    mask = compute_tissue_mask(img) if tissue_only else None
    hist = chroma.compute_histogram(img, bins=bins, epsilon=epsilon, mask=mask)
    chroma.save_sidecar(hist, out)
    if json_out is not None:
        Path(json_out).write_text(chroma.to_json(hist))
    return hist


def run_seam(
    image: str | Path,
    geometry: TileGeometry = TileGeometry(),
    report_path: str | Path | None = None,
) -> SeamReport:
    """Score the tile-boundary seams of an already stitched slide."""
    img = load_image(image)
    plan = plan_tiles(img.width, img.height, geometry)
    report = seam_discontinuity(img, plan)
    if report_path is not None:
        Path(report_path).write_text(report.to_json())
    return report
