"""Image-quality metrics (PSNR, RMSE) and detection matching (P/R/F1).

PSNR of identical images returns ``math.inf`` rather than an arbitrary cap;
report serialization renders it as the string ``"infinite"``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .image import RasterImage

DEFAULT_IOU_THRESHOLD = 0.5


@dataclass(frozen=True)
class DetectionBox:
    """Axis-aligned box with a confidence score in [0,1]."""

    x: float
    y: float
    w: float
    h: float
    score: float = 1.0

    def __post_init__(self) -> None:
        if self.w < 1 or self.h < 1:
            raise ValidationError(f"box extent must be >= 1, got {self.w}x{self.h}")
        if not 0.0 <= self.score <= 1.0:
            raise ValidationError(f"score must be in [0,1], got {self.score}")

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class DetectionMetrics:
    precision: float
    recall: float
    f1: float
    true_positives: int
    n_pred: int
    n_gt: int


def rmse(a: RasterImage, b: RasterImage) -> float:
    """Root mean squared sample difference in 8-bit units."""
    if a.array.shape != b.array.shape:
        raise ValidationError(f"dimension mismatch: {a.array.shape} vs {b.array.shape}")
    diff = a.array.astype(np.float64) - b.array.astype(np.float64)
    return float(np.sqrt(np.mean(diff * diff)))


def psnr(a: RasterImage, b: RasterImage, peak: float = 255.0) -> float:
    """20*log10(peak/rmse) in dB; identical images yield math.inf."""
    err = rmse(a, b)
    if err == 0.0:
        return math.inf
    return 20.0 * math.log10(peak / err)


def iou(a: DetectionBox, b: DetectionBox) -> float:
    """Intersection over union of two boxes."""
    ix = max(0.0, min(a.x + a.w, b.x + b.w) - max(a.x, b.x))
    iy = max(0.0, min(a.y + a.h, b.y + b.h) - max(a.y, b.y))
    inter = ix * iy
    if inter <= 0.0:
        return 0.0
    return inter / (a.area + b.area - inter)


def _f1(precision: float, recall: float) -> float:
    return 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0


def match_and_score(
    preds: list[DetectionBox],
    gts: list[DetectionBox],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> DetectionMetrics:
    """Greedy score-ordered matching against ground truth.

    Predictions are visited in descending score (ties keep input order) and
    each claims the unmatched ground truth with the highest IoU at or above
    the threshold.  Empty-vs-empty scores 1.0 across the board; when exactly
    one side is empty the undefined ratio counts as 0.
    """
    if not 0.0 < iou_threshold <= 1.0:
        raise ValidationError(f"iou threshold must be in (0,1], got {iou_threshold}")
    n_pred, n_gt = len(preds), len(gts)
    if n_pred == 0 and n_gt == 0:
        return DetectionMetrics(1.0, 1.0, 1.0, 0, 0, 0)
    tp = 0
    taken = [False] * n_gt
    order = sorted(range(n_pred), key=lambda i: -preds[i].score)
    for i in order:
        best_j = -1
        best_iou = 0.0
        for j, gt in enumerate(gts):
            if taken[j]:
                continue
            overlap = iou(preds[i], gt)
            if overlap >= iou_threshold and overlap > best_iou:
                best_iou = overlap
                best_j = j
        if best_j >= 0:
            taken[best_j] = True
            tp += 1
    precision = tp / n_pred if n_pred > 0 else 0.0
    recall = tp / n_gt if n_gt > 0 else 0.0
    return DetectionMetrics(precision, recall, _f1(precision, recall), tp, n_pred, n_gt)


def optimal_match_count(
    preds: list[DetectionBox],
    gts: list[DetectionBox],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> int:
    """Exhaustive maximum one-to-one matching (oracle for small instances).

    Branches over every assignment of predictions to ground truths whose IoU
    meets the threshold; intended for instances with at most ~8 boxes per
    side.
    """
    feasible = [
        [j for j, gt in enumerate(gts) if iou(p, gt) >= iou_threshold] for p in preds
    ]

    def solve(i: int, taken: int) -> int:
        if i == len(preds):
            return 0
        best = solve(i + 1, taken)  # leave prediction i unmatched
        for j in feasible[i]:
            if not taken & (1 << j):
                best = max(best, 1 + solve(i + 1, taken | (1 << j)))
        return best

    return solve(0, 0)


def load_detections(path: str | Path) -> list[DetectionBox]:
    """Read the JSON interchange format: an array of {x, y, w, h, score}."""
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"malformed detections file {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise ValidationError(f"detections file {path} must hold a JSON array")
    boxes = []
    for i, entry in enumerate(raw):
        try:
            boxes.append(
                DetectionBox(
                    x=float(entry["x"]),
                    y=float(entry["y"]),
                    w=float(entry["w"]),
                    h=float(entry["h"]),
                    score=float(entry.get("score", 1.0)),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"bad detection entry {i} in {path}: {exc}") from exc
    return boxes


def save_detections(boxes: list[DetectionBox], path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(
            [{"x": b.x, "y": b.y, "w": b.w, "h": b.h, "score": b.score} for b in boxes]
        )
    )


def metrics_to_dict(m: DetectionMetrics) -> dict:
    return {
        "precision": m.precision,
        "recall": m.recall,
        "f1": m.f1,
        "true_positives": m.true_positives,
        "n_pred": m.n_pred,
        "n_gt": m.n_gt,
    }


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def batch_image_report(pairs: list[tuple[RasterImage, RasterImage]]) -> dict:
    """Per-patch PSNR/RMSE plus their means, as a JSON-ready dict.

    Aggregation is order-independent (plain means over patches); an
    identical pair makes the mean PSNR infinite, rendered "infinite".
    """
    patches = [{"psnr": psnr(a, b), "rmse": rmse(a, b)} for a, b in pairs]
    mean_psnr = _mean([p["psnr"] for p in patches])
    report = {
        "patches": [
            {**p, "psnr": "infinite" if math.isinf(p["psnr"]) else p["psnr"]}
            for p in patches
        ],
        "mean_psnr": "infinite" if math.isinf(mean_psnr) else mean_psnr,
        "mean_rmse": _mean([p["rmse"] for p in patches]),
        "count": len(patches),
    }
    return report


def batch_detection_report(
    instances: list[tuple[list[DetectionBox], list[DetectionBox]]],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> dict:
    """Per-patch detection metrics plus macro-averaged P/R/F1."""
    per_patch = [metrics_to_dict(match_and_score(p, g, iou_threshold)) for p, g in instances]
    return {
        "patches": per_patch,
        "mean_precision": _mean([m["precision"] for m in per_patch]),
        "mean_recall": _mean([m["recall"] for m in per_patch]),
        "mean_f1": _mean([m["f1"] for m in per_patch]),
        "count": len(per_patch),
    }
