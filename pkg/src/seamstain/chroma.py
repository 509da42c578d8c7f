"""Intensity-weighted 2-D log-chroma histograms used as the color condition.

Each pixel (R,G,B on a [0,1] scale) contributes its intensity
``I = sqrt(R^2+G^2+B^2)`` to one bin of each of three planes.  Plane ``c``
anchors channel c against the other two in fixed order:

    anchor R: u = ln((R+eps)/(G+eps)), v = ln((R+eps)/(B+eps))
    anchor G: u = ln((G+eps)/(R+eps)), v = ln((G+eps)/(B+eps))
    anchor B: u = ln((B+eps)/(R+eps)), v = ln((B+eps)/(G+eps))

u and v are clamped to the axis range (default [-3, 3]), weights accumulate
into the nearest bin, and all three planes are normalized jointly to sum 1.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import HistogramError, ValidationError
from .image import RasterImage, TissueMask

DEFAULT_BINS = 64
DEFAULT_EPSILON = 1e-6
AXIS_RANGE = (-3.0, 3.0)

# Index of the "other two" channels, in the fixed order listed above.
_ANCHOR_PARTNERS = ((1, 2), (0, 2), (0, 1))

SIDECAR_MAGIC = b"CCH1"
_SIDECAR_HEADER = struct.Struct("<4sI8x")  # magic, bins, 8 reserved zero bytes


@dataclass(frozen=True, eq=False)
class ChromaHistogram:
    """Normalized (3, bins, bins) histogram; plane axis 1 is u, axis 2 is v."""

    values: np.ndarray
    epsilon: float = DEFAULT_EPSILON
    axis_range: tuple[float, float] = AXIS_RANGE

    def __post_init__(self) -> None:
        v = self.values
        if v.ndim != 3 or v.shape[0] != 3 or v.shape[1] != v.shape[2] or v.shape[1] < 2:
            raise HistogramError(f"histogram must be (3, bins, bins) with bins >= 2, got {v.shape}")
        if np.any(v < 0):
            raise HistogramError("histogram values must be non-negative")
        v.setflags(write=False)

    @property
    def bins(self) -> int:
        return self.values.shape[1]

    @property
    def bin_width(self) -> float:
        lo, hi = self.axis_range
        return (hi - lo) / self.bins

    def bin_centers(self) -> np.ndarray:
        lo, _ = self.axis_range
        return lo + (np.arange(self.bins) + 0.5) * self.bin_width

    def total(self) -> float:
        return float(self.values.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChromaHistogram):
            return NotImplemented
        return self.values.shape == other.values.shape and bool(
            np.array_equal(self.values, other.values)
        )


@dataclass(frozen=True)
class PlaneStats:
    """Weighted moments of one anchor plane over bin centers."""

    mass: float
    mean_u: float
    mean_v: float
    sd_u: float
    sd_v: float


def bin_index(x: np.ndarray, bins: int, axis_range: tuple[float, float] = AXIS_RANGE) -> np.ndarray:
    """Nearest-bin index of clamped log-chroma values."""
    lo, hi = axis_range
    width = (hi - lo) / bins
    clamped = np.clip(x, lo, hi)
    return np.minimum(((clamped - lo) / width).astype(np.int64), bins - 1)


def compute_histogram(
    img: RasterImage,
    bins: int = DEFAULT_BINS,
    epsilon: float = DEFAULT_EPSILON,
    mask: TissueMask | None = None,
) -> ChromaHistogram:
    """Build the normalized 3-plane log-chroma histogram of an image.

    With a mask, only True pixels are counted.  Raises
    :class:`HistogramError` when no pixel contributes mass (fully masked
    image, or an all-black image whose intensity weights are all zero).
    """
    if bins < 2:
        raise HistogramError(f"bins must be >= 2, got {bins}")
    if epsilon <= 0:
        raise HistogramError(f"epsilon must be > 0, got {epsilon}")
    rgb = img.array.reshape(-1, 3).astype(np.float64) / 255.0
    if mask is not None:
        if mask.width != img.width or mask.height != img.height:
            raise HistogramError(
                f"mask {mask.width}x{mask.height} does not match image {img.width}x{img.height}"
            )
        rgb = rgb[mask.bits.reshape(-1)]
    if rgb.shape[0] == 0:
        raise HistogramError("empty histogram source")
    weights = np.sqrt(np.sum(rgb * rgb, axis=1))
    log_ch = np.log(rgb + epsilon)
    planes = np.empty((3, bins, bins), dtype=np.float64)
    for anchor, (p1, p2) in enumerate(_ANCHOR_PARTNERS):
        iu = bin_index(log_ch[:, anchor] - log_ch[:, p1], bins)
        iv = bin_index(log_ch[:, anchor] - log_ch[:, p2], bins)
        flat = np.bincount(iu * bins + iv, weights=weights, minlength=bins * bins)
        planes[anchor] = flat.reshape(bins, bins)
    total = planes.sum()
    if total <= 0.0:
        raise HistogramError("empty histogram source")
    return ChromaHistogram(planes / total, epsilon=epsilon)


def chroma_stats(h: ChromaHistogram) -> list[PlaneStats]:
    """Per-anchor mean and population sd of (u, v) over mass-weighted bin centers.

    A plane with zero mass yields zeros for all moments (its ``mass`` field
    is the discriminator).
    """
    centers = h.bin_centers()
    out: list[PlaneStats] = []
    for anchor in range(3):
        plane = h.values[anchor]
        mass = float(plane.sum())
        if mass <= 0.0:
            out.append(PlaneStats(0.0, 0.0, 0.0, 0.0, 0.0))
            continue
        wu = plane.sum(axis=1) / mass
        wv = plane.sum(axis=0) / mass
        mean_u = float(wu @ centers)
        mean_v = float(wv @ centers)
        var_u = float(wu @ (centers - mean_u) ** 2)
        var_v = float(wv @ (centers - mean_v) ** 2)
        out.append(
            PlaneStats(mass, mean_u, mean_v, np.sqrt(max(var_u, 0.0)), np.sqrt(max(var_v, 0.0)))
        )
    return out


def save_sidecar(h: ChromaHistogram, path: str | Path) -> None:
    """Write the binary sidecar: 16-byte header then 3*bins^2 little-endian float32."""
    payload = h.values.astype("<f4").tobytes()
    Path(path).write_bytes(_SIDECAR_HEADER.pack(SIDECAR_MAGIC, h.bins) + payload)


def load_sidecar(path: str | Path) -> ChromaHistogram:
    """Read a histogram sidecar written by :func:`save_sidecar`."""
    data = Path(path).read_bytes()
    if len(data) < _SIDECAR_HEADER.size:
        raise HistogramError(f"sidecar {path} truncated ({len(data)} bytes)")
    magic, bins = _SIDECAR_HEADER.unpack_from(data)
    if magic != SIDECAR_MAGIC:
        raise HistogramError(f"sidecar {path} has bad magic {magic!r}")
    expected = _SIDECAR_HEADER.size + 3 * bins * bins * 4
    if len(data) != expected:
        raise HistogramError(f"sidecar {path} length {len(data)} != expected {expected}")
    values = np.frombuffer(data, dtype="<f4", offset=_SIDECAR_HEADER.size).astype(np.float64)
    return ChromaHistogram(values.reshape(3, bins, bins).copy())


def to_json(h: ChromaHistogram) -> str:
    """Debug-friendly JSON export of the histogram."""
    return json.dumps(
        {
            "bins": h.bins,
            "axis_range": list(h.axis_range),
            "epsilon": h.epsilon,
            "values": h.values.reshape(-1).tolist(),
        }
    )


def validate_condition(h: ChromaHistogram) -> None:
    """Reject histograms unusable as a color condition (no mass, unnormalized)."""
    total = h.total()
    if total <= 0.0:
        raise ValidationError("empty histogram condition")
    if abs(total - 1.0) > 1e-3:
        raise ValidationError(f"condition histogram not normalized (sum {total})")
