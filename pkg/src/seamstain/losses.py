"""Objective terms as pure value functions.

No gradients, no clamping: log singularities raise instead of saturating so
the values stay exact for testing.  Callers sanitize their own inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chroma import ChromaHistogram
from .errors import ValidationError


@dataclass(frozen=True)
class DiscriminatorOutputs:
    """Scalar probabilities from the two discriminator scales, each in (0,1)."""

    per_scale: tuple[float, float]

    def __post_init__(self) -> None:
        if len(self.per_scale) != 2:
            raise ValidationError(f"expected 2 discriminator scales, got {len(self.per_scale)}")


@dataclass(frozen=True)
class DetectionLossComponents:
    classification: float
    localization: float
    segmentation: float


@dataclass(frozen=True)
class LossWeights:
    """Feature-matching weight; 10.0 follows the base translation model."""

    lambda_feat: float = 10.0

    def __post_init__(self) -> None:
        if self.lambda_feat < 0:
            raise ValidationError(f"lambda_feat must be >= 0, got {self.lambda_feat}")


FeatureMapSet = Sequence[np.ndarray]


def histogram_loss(h_g: ChromaHistogram, h_s: ChromaHistogram) -> float:
    """Half the L2 distance between element-wise square roots of the histograms."""
    if h_g.values.shape != h_s.values.shape:
        raise ValidationError(
            f"histogram shape mismatch: {h_g.values.shape} vs {h_s.values.shape}"
        )
    diff = np.sqrt(h_g.values) - np.sqrt(h_s.values)
    return 0.5 * float(np.linalg.norm(diff.reshape(-1)))


def adaptive_weight(tissue_portion: float) -> float:
    """Logistic sigmoid of the tissue portion; maps [0,1] onto [0.5, sigmoid(1)]."""
    if not 0.0 <= tissue_portion <= 1.0:
        raise ValidationError(f"tissue portion must be in [0,1], got {tissue_portion}")
    return 1.0 / (1.0 + math.exp(-tissue_portion))


def gan_value(real_outputs: DiscriminatorOutputs, fake_outputs: DiscriminatorOutputs) -> float:
    """Sum over scales of ln(real_i) + ln(1 - fake_i), natural log, no clamping."""
    total = 0.0
    for real, fake in zip(real_outputs.per_scale, fake_outputs.per_scale):
        if not (0.0 < real < 1.0) or not (0.0 < fake < 1.0):
            raise ValidationError(
                f"discriminator outputs must lie strictly in (0,1): real={real} fake={fake}"
            )
        total += math.log(real) + math.log(1.0 - fake)
    return total


def feature_matching_value(
    real: FeatureMapSet, fake: FeatureMapSet, reduction: str = "mean"
) -> float:
    """L1 feature-matching value: per-layer mean absolute difference, then
    averaged (default) or summed over layers."""
    if len(real) != len(fake):
        raise ValidationError(f"layer count mismatch: {len(real)} vs {len(fake)}")
    if len(real) == 0:
        raise ValidationError("feature map sets must contain at least one layer")
    if reduction not in ("mean", "sum"):
        raise ValidationError(f"unknown reduction {reduction!r}")
    per_layer = []
    for i, (r, f) in enumerate(zip(real, fake)):
        r = np.asarray(r, dtype=np.float64)
        f = np.asarray(f, dtype=np.float64)
        if r.shape != f.shape:
            raise ValidationError(f"layer {i} shape mismatch: {r.shape} vs {f.shape}")
        per_layer.append(float(np.mean(np.abs(r - f))))
    total = float(sum(per_layer))
    return total / len(per_layer) if reduction == "mean" else total


def detection_value(c: DetectionLossComponents) -> float:
    """Sum of the classification, localization and segmentation components."""
    for name, v in (
        ("classification", c.classification),
        ("localization", c.localization),
        ("segmentation", c.segmentation),
    ):
        if v < 0:
            raise ValidationError(f"negative detection component {name}={v}")
    return c.classification + c.localization + c.segmentation


def combined_objective(
    gan: float,
    feat: float,
    det: float,
    hist: float,
    tissue_portion: float,
    w: LossWeights = LossWeights(),
) -> float:
    """gan + lambda_feat*feat + det + adaptive_weight(tissue_portion)*hist."""
    for name, v in (("gan", gan), ("feat", feat), ("det", det), ("hist", hist)):
        if not math.isfinite(v):
            raise ValidationError(f"non-finite component {name}={v}")
    return gan + w.lambda_feat * feat + det + adaptive_weight(tissue_portion) * hist
