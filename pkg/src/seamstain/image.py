"""8-bit RGB raster container, file I/O, region arithmetic, and tissue estimation.

Rasters are immutable values: every operation returns a new image and the
backing numpy array is marked read-only, so instances are safe to share
between threads.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import BoundsError, ImageReadError, ValidationError

# Guard against pathological headers before allocating width*height*3 bytes.
MAX_SAMPLES = 1 << 31

SUPPORTED_SUFFIXES = {".png", ".ppm"}

# Default tissue criterion: reject near-white background.  A pixel is tissue
# when its HSV saturation exceeds SAT_MIN and its luminance (mean of R,G,B on
# a [0,1] scale) stays below LUM_MAX.
DEFAULT_SAT_MIN = 0.05
DEFAULT_LUM_MAX = 0.95


def quantize_u8(values: np.ndarray) -> np.ndarray:
    """Round half up to 8-bit, the quantization rule used package-wide."""
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class RasterImage:
    """Row-major 8-bit RGB raster of shape (height, width, 3)."""

    array: np.ndarray

    def __post_init__(self) -> None:
        a = self.array
        if a.dtype != np.uint8 or a.ndim != 3 or a.shape[2] != 3:
            raise ValidationError(f"raster must be uint8 HxWx3, got {a.dtype} {a.shape}")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ValidationError(f"raster dimensions must be >= 1, got {a.shape}")
        a.setflags(write=False)

    @classmethod
    def from_array(cls, array: np.ndarray) -> "RasterImage":
        """Copy an arbitrary array-like into an owned, validated raster."""
        return cls(np.ascontiguousarray(array, dtype=np.uint8).copy())

    @property
    def width(self) -> int:
        return self.array.shape[1]

    @property
    def height(self) -> int:
        return self.array.shape[0]

    @property
    def channels(self) -> int:
        return 3

    @property
    def samples(self) -> bytes:
        """Row-major interleaved RGB bytes, length width*height*3."""
        return self.array.tobytes()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.array.shape == other.array.shape and bool(
            np.array_equal(self.array, other.array)
        )

    def __repr__(self) -> str:
        return f"RasterImage({self.width}x{self.height})"


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle in pixel coordinates."""

    x: int
    y: int
    w: int
    h: int

    def __post_init__(self) -> None:
        if self.w < 1 or self.h < 1:
            raise ValidationError(f"region extent must be >= 1, got {self.w}x{self.h}")

    def within(self, img: RasterImage) -> bool:
        return (
            self.x >= 0
            and self.y >= 0
            and self.x + self.w <= img.width
            and self.y + self.h <= img.height
        )


@dataclass(frozen=True, eq=False)
class TissueMask:
    """Boolean per-pixel mask, True where the pixel counts as tissue."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        b = self.bits
        if b.dtype != np.bool_ or b.ndim != 2:
            raise ValidationError(f"mask must be bool HxW, got {b.dtype} {b.shape}")
        b.setflags(write=False)

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


def load_image(path: str | Path) -> RasterImage:
    """Decode a PNG or binary PPM file into an RGB raster.

    Grayscale inputs are replicated across channels and any alpha channel is
    discarded.  Raises :class:`ImageReadError` for unreadable or truncated
    files, unsupported formats, and absurd dimensions.
    """
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in SUPPORTED_SUFFIXES:
        raise ImageReadError(f"unsupported format {suffix!r} for {path} (PNG/PPM only)")
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ImageReadError(f"unreadable file {path}: {exc}") from exc
    try:
        with Image.open(io.BytesIO(data)) as im:
            if im.width * im.height * 3 > MAX_SAMPLES:
                raise ImageReadError(f"dimension overflow: {im.width}x{im.height}")
            rgb = im.convert("RGB")
            array = np.asarray(rgb, dtype=np.uint8)
    except ImageReadError:
        raise
    except Image.DecompressionBombError as exc:
        raise ImageReadError(f"dimension overflow: {exc}") from exc
    except (UnidentifiedImageError, OSError, SyntaxError, ValueError) as exc:
        raise ImageReadError(f"unreadable file {path}: {exc}") from exc
    return RasterImage(array.copy())


def save_image(img: RasterImage, path: str | Path) -> None:
    """Write a raster as PNG or binary PPM, chosen by file suffix."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix not in SUPPORTED_SUFFIXES:
        raise ImageReadError(f"unsupported format {suffix!r} for {path} (PNG/PPM only)")
    pil = Image.fromarray(np.asarray(img.array), mode="RGB")
    if suffix == ".ppm":
        pil.save(path, format="PPM")
    else:
        pil.save(path, format="PNG")


def encode_png(img: RasterImage) -> bytes:
    """PNG-encode a raster in memory (used by the study image endpoints)."""
    buf = io.BytesIO()
    Image.fromarray(np.asarray(img.array), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def crop(img: RasterImage, r: Region) -> RasterImage:
    """Return exactly the sub-raster covered by ``r``."""
    if not r.within(img):
        raise BoundsError(
            f"out-of-bounds region {r} for {img.width}x{img.height} image"
        )
    return RasterImage(img.array[r.y : r.y + r.h, r.x : r.x + r.w].copy())


def paste(src: RasterImage, dst: RasterImage, at: Region) -> RasterImage:
    """Return ``dst`` with ``src`` written at ``at``; all other pixels unchanged."""
    if at.w != src.width or at.h != src.height:
        raise BoundsError(
            f"dimension mismatch: region {at.w}x{at.h} vs source {src.width}x{src.height}"
        )
    if not at.within(dst):
        raise BoundsError(
            f"out-of-bounds region {at} for {dst.width}x{dst.height} image"
        )
    out = dst.array.copy()
    out[at.y : at.y + at.h, at.x : at.x + at.w] = src.array
    return RasterImage(out)


def mirror_indices(start: int, count: int, dim: int) -> np.ndarray:
    """Map coordinates [start, start+count) onto [0, dim) by mirror reflection.

    The reflection excludes the edge pixel (coordinate -1 maps to 1, not 0)
    and is periodic with period 2*dim-2, so arbitrarily large overhangs are
    defined for any dim >= 2.  An in-bounds range needs no reflection and is
    returned as-is whatever the dimension.
    """
    if start >= 0 and start + count <= dim:
        return np.arange(start, start + count)
    if dim < 2:
        raise BoundsError(f"reflection impossible for dimension {dim} (pad >= dimension)")
    idx = np.arange(start, start + count)
    period = 2 * dim - 2
    idx = np.mod(idx, period)
    return np.where(idx >= dim, period - idx, idx)


def reflect_pad(
    img: RasterImage, left: int, right: int, top: int, bottom: int
) -> RasterImage:
    """Mirror-pad without repeating the edge pixel (pad 1 left copies column 1).

    Each pad amount must be smaller than the corresponding image dimension.
    """
    for pad, dim, name in (
        (left, img.width, "left"),
        (right, img.width, "right"),
        (top, img.height, "top"),
        (bottom, img.height, "bottom"),
    ):
        if pad < 0:
            raise ValidationError(f"negative {name} pad {pad}")
        if pad >= dim:
            raise BoundsError(f"{name} pad {pad} >= image dimension {dim}")
    rows = mirror_indices(-top, img.height + top + bottom, img.height)
    cols = mirror_indices(-left, img.width + left + right, img.width)
    return RasterImage(img.array[np.ix_(rows, cols)].copy())


def compute_tissue_mask(
    img: RasterImage,
    sat_min: float = DEFAULT_SAT_MIN,
    lum_max: float = DEFAULT_LUM_MAX,
) -> TissueMask:
    """Mark pixels as tissue when saturation > sat_min and luminance < lum_max.

    Saturation is HSV saturation ((max-min)/max, 0 for black); luminance is
    the channel mean; both on [0,1] scales.
    """
    rgb = img.array.astype(np.float64) / 255.0
    mx = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    sat = np.where(mx > 0, (mx - mn) / np.maximum(mx, 1e-12), 0.0)
    lum = rgb.mean(axis=2)
    return TissueMask((sat > sat_min) & (lum < lum_max))


def tissue_portion(mask: TissueMask) -> float:
    """Fraction of mask pixels that are tissue."""
    return float(np.count_nonzero(mask.bits)) / mask.bits.size


def downsample(img: RasterImage, factor: int) -> RasterImage:
    """Box-filter mean over factor x factor blocks, rounded half up.

    Output dimensions are ceil(dim/factor); partial edge blocks average over
    the pixels actually present.
    """
    if factor < 1:
        raise ValidationError(f"downsample factor must be >= 1, got {factor}")
    if factor == 1:
        return img
    a = img.array.astype(np.float64)
    h, w = a.shape[:2]
    row_starts = np.arange(0, h, factor)
    col_starts = np.arange(0, w, factor)
    sums = np.add.reduceat(np.add.reduceat(a, row_starts, axis=0), col_starts, axis=1)
    row_counts = np.minimum(row_starts + factor, h) - row_starts
    col_counts = np.minimum(col_starts + factor, w) - col_starts
    counts = np.multiply.outer(row_counts, col_counts)[:, :, None]
    return RasterImage(quantize_u8(sums / counts))
