"""Overlapping tile grid: plan, context-aware extraction, center-crop stitching.

Tiles are read at ``input_size`` (default 256) but only their centered
``output_size`` (default 192) core survives stitching; the surrounding
context ring is discarded.  Core regions partition a padded canvas whose
dimensions are the next multiples of ``output_size``; coordinates outside the
original slide are filled by mirror reflection of the slide content.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import BoundsError, GeometryError, TileAssemblyError
from .image import RasterImage, Region, mirror_indices


@dataclass(frozen=True)
class TileGeometry:
    """Input/output tile sizes; context is the per-side overlap ring."""

    input_size: int = 256
    output_size: int = 192

    def __post_init__(self) -> None:
        if self.output_size < 1 or self.input_size <= self.output_size:
            raise GeometryError(
                f"need input_size > output_size >= 1, got {self.input_size}/{self.output_size}"
            )
        if (self.input_size - self.output_size) % 2 != 0:
            raise GeometryError(
                f"input_size - output_size must be even, got {self.input_size - self.output_size}"
            )

    @property
    def context(self) -> int:
        return (self.input_size - self.output_size) // 2


@dataclass(frozen=True)
class TileRef:
    """One grid cell: its core on the padded canvas and its inflated source."""

    row: int
    col: int
    core: Region
    source: Region  # may extend past padded bounds; resolved by reflection


@dataclass(frozen=True)
class TilePlan:
    """Row-major grid covering a slide, cores partitioning the padded canvas."""

    slide_width: int
    slide_height: int
    rows: int
    cols: int
    geometry: TileGeometry

    @property
    def padded_width(self) -> int:
        return self.cols * self.geometry.output_size

    @property
    def padded_height(self) -> int:
        return self.rows * self.geometry.output_size

    @property
    def tile_count(self) -> int:
        return self.rows * self.cols

    def tile(self, row: int, col: int) -> TileRef:
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise BoundsError(f"tile index ({row},{col}) outside {self.rows}x{self.cols} plan")
        out = self.geometry.output_size
        ctx = self.geometry.context
        core = Region(col * out, row * out, out, out)
        source = Region(core.x - ctx, core.y - ctx, out + 2 * ctx, out + 2 * ctx)
        return TileRef(row, col, core, source)

    def __iter__(self) -> Iterator[TileRef]:
        for row in range(self.rows):
            for col in range(self.cols):
                yield self.tile(row, col)


def plan_tiles(
    slide_width: int, slide_height: int, geometry: TileGeometry = TileGeometry()
) -> TilePlan:
    """Lay out the row-major grid of overlapping tiles covering a slide."""
    if slide_width < 1 or slide_height < 1:
        raise GeometryError(f"slide dimensions must be >= 1, got {slide_width}x{slide_height}")
    out = geometry.output_size
    return TilePlan(
        slide_width=slide_width,
        slide_height=slide_height,
        rows=math.ceil(slide_height / out),
        cols=math.ceil(slide_width / out),
        geometry=geometry,
    )


def extract_tile(slide: RasterImage, plan: TilePlan, row: int, col: int) -> RasterImage:
    """Read one input_size tile, mirror-reflecting coordinates beyond the slide.

    The slide must be strictly larger than the context ring in both
    dimensions; smaller slides cannot satisfy reflection and are rejected.
    """
    if slide.width != plan.slide_width or slide.height != plan.slide_height:
        raise BoundsError(
            f"slide {slide.width}x{slide.height} does not match plan "
            f"{plan.slide_width}x{plan.slide_height}"
        )
    ctx = plan.geometry.context
    if slide.width <= ctx or slide.height <= ctx:
        raise GeometryError(
            f"slide {slide.width}x{slide.height} too small for context ring {ctx} "
            "(reflection pad >= dimension)"
        )
    ref = plan.tile(row, col)
    rows_idx = mirror_indices(ref.source.y, ref.source.h, slide.height)
    cols_idx = mirror_indices(ref.source.x, ref.source.w, slide.width)
    return RasterImage(slide.array[np.ix_(rows_idx, cols_idx)].copy())


def stitch(
    cores: Iterable[tuple[int, int, RasterImage]] | Sequence[tuple[int, int, RasterImage]],
    plan: TilePlan,
) -> RasterImage:
    """Assemble output_size cores into the original-size slide.

    Cores may arrive in any order (they are keyed by row/col); exactly one
    core per grid cell is required.  Cores are pasted at their core regions
    on the padded canvas, which is then cropped back to the slide dimensions.
    """
    out = plan.geometry.output_size
    canvas = np.zeros((plan.padded_height, plan.padded_width, 3), dtype=np.uint8)
    seen: set[tuple[int, int]] = set()
    for row, col, core in cores:
        if not (0 <= row < plan.rows and 0 <= col < plan.cols):
            raise TileAssemblyError(f"tile ({row},{col}) outside {plan.rows}x{plan.cols} plan")
        if (row, col) in seen:
            raise TileAssemblyError(f"missing/duplicate tile: ({row},{col}) supplied twice")
        if core.width != out or core.height != out:
            raise TileAssemblyError(
                f"wrong core size {core.width}x{core.height} at ({row},{col}), expected {out}"
            )
        seen.add((row, col))
        canvas[row * out : (row + 1) * out, col * out : (col + 1) * out] = core.array
    if len(seen) != plan.tile_count:
        missing = [
            (r, c) for r in range(plan.rows) for c in range(plan.cols) if (r, c) not in seen
        ]
        raise TileAssemblyError(f"missing/duplicate tile: missing {missing[:8]}")
    return RasterImage(canvas[: plan.slide_height, : plan.slide_width].copy())
