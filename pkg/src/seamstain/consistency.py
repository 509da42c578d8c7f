"""Composite-tile construction and quantitative seam-artifact measurement.

The composite keeps the synthesized center crop and surrounds it with ground
truth, so a discriminator (out of scope here) can judge how well the center
blends into genuine context.  The seam index quantifies stitching artifacts:
mean absolute pixel step across each interior core boundary, minus a nearby
off-seam baseline, so ordinary image content cancels out.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, ValidationError
from .image import RasterImage
from .tiles import TilePlan

DEFAULT_BASELINE_OFFSET = 3


@dataclass(frozen=True)
class CompositeSpec:
    """Tile size and the centered square kept from the synthesized image."""

    tile_size: int = 256
    center_size: int = 192

    def __post_init__(self) -> None:
        if not 1 <= self.center_size < self.tile_size:
            raise ValidationError(
                f"need 1 <= center_size < tile_size, got {self.center_size}/{self.tile_size}"
            )
        if (self.tile_size - self.center_size) % 2 != 0:
            raise ValidationError("tile_size - center_size must be even")

    @property
    def margin(self) -> int:
        return (self.tile_size - self.center_size) // 2


@dataclass(frozen=True)
class SeamReport:
    """Per-seam discontinuities (8-bit units) and their mean."""

    vertical_seams: tuple[float, ...]
    horizontal_seams: tuple[float, ...]
    global_index: float
    baseline: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "vertical_seams": list(self.vertical_seams),
                "horizontal_seams": list(self.horizontal_seams),
                "global_index": self.global_index,
                "baseline": self.baseline,
            }
        )


def make_composite(
    synth: RasterImage, truth: RasterImage, spec: CompositeSpec = CompositeSpec()
) -> RasterImage:
    """Center crop from ``synth``, everything else from ``truth``."""
    for name, img in (("synth", synth), ("truth", truth)):
        if img.width != spec.tile_size or img.height != spec.tile_size:
            raise ValidationError(
                f"{name} tile is {img.width}x{img.height}, expected {spec.tile_size} square"
            )
    m = spec.margin
    out = truth.array.copy()
    out[m : m + spec.center_size, m : m + spec.center_size] = synth.array[
        m : m + spec.center_size, m : m + spec.center_size
    ]
    return RasterImage(out)


def _step_mean(a: np.ndarray, axis: int, index: int) -> float:
    """Mean |I(index) - I(index-1)| along one axis, over the other axis and channels."""
    if axis == 1:
        return float(np.mean(np.abs(a[:, index].astype(np.float64) - a[:, index - 1])))
    return float(np.mean(np.abs(a[index].astype(np.float64) - a[index - 1])))


def seam_discontinuity(
    stitched: RasterImage,
    plan: TilePlan,
    baseline_offset: int = DEFAULT_BASELINE_OFFSET,
) -> SeamReport:
    """Score interior core boundaries of a stitched slide.

    For each interior seam the raw step is compared with the same statistic
    at ``baseline_offset`` pixels on either side (clamped in bounds); the
    per-seam value is max(0, step - baseline).  The report's global index is
    the mean over all seams, 0 when the plan has a single tile.
    """
    if stitched.width != plan.slide_width or stitched.height != plan.slide_height:
        raise BoundsError(
            f"stitched {stitched.width}x{stitched.height} does not match plan "
            f"{plan.slide_width}x{plan.slide_height}"
        )
    if baseline_offset < 1:
        raise ValidationError(f"baseline offset must be >= 1, got {baseline_offset}")
    a = stitched.array
    out = plan.geometry.output_size

    def score(axis: int, dim: int, count: int) -> tuple[list[float], list[float]]:
        values, baselines = [], []
        for k in range(1, count):
            seam = k * out
            lo = max(1, seam - baseline_offset)
            hi = min(dim - 1, seam + baseline_offset)
            step = _step_mean(a, axis, seam)
            base = 0.5 * (_step_mean(a, axis, lo) + _step_mean(a, axis, hi))
            values.append(max(0.0, step - base))
            baselines.append(base)
        return values, baselines

    v_vals, v_base = score(1, stitched.width, plan.cols)
    h_vals, h_base = score(0, stitched.height, plan.rows)
    all_vals = v_vals + h_vals
    all_base = v_base + h_base
    return SeamReport(
        vertical_seams=tuple(v_vals),
        horizontal_seams=tuple(h_vals),
        global_index=float(np.mean(all_vals)) if all_vals else 0.0,
        baseline=float(np.mean(all_base)) if all_base else 0.0,
    )
