"""Seamless whole-slide virtual staining toolkit.

Overlapping tile extraction, histogram-conditioned translation, center-crop
stitching, consistency losses and seam metrics, image/detection evaluation,
and a blinded reviewer-study service.
"""

from .chroma import ChromaHistogram, chroma_stats, compute_histogram
from .consistency import CompositeSpec, SeamReport, make_composite, seam_discontinuity
from .image import (
    RasterImage,
    Region,
    TissueMask,
    compute_tissue_mask,
    crop,
    downsample,
    load_image,
    paste,
    reflect_pad,
    save_image,
    tissue_portion,
)
from .losses import (
    DetectionLossComponents,
    DiscriminatorOutputs,
    LossWeights,
    adaptive_weight,
    combined_objective,
    detection_value,
    feature_matching_value,
    gan_value,
    histogram_loss,
)
from .metrics import DetectionBox, DetectionMetrics, iou, match_and_score, psnr, rmse
from .tiles import TileGeometry, TilePlan, TileRef, extract_tile, plan_tiles, stitch
from .translate import (
    ChromaMatchConfig,
    ExternalTranslator,
    TranslationRequest,
    TranslationResult,
    translate_chroma_match,
    translate_identity,
)

__version__ = "0.1.0"

__all__ = [
    "ChromaHistogram",
    "chroma_stats",
    "compute_histogram",
    "CompositeSpec",
    "SeamReport",
    "make_composite",
    "seam_discontinuity",
    "RasterImage",
    "Region",
    "TissueMask",
    "compute_tissue_mask",
    "crop",
    "downsample",
    "load_image",
    "paste",
    "reflect_pad",
    "save_image",
    "tissue_portion",
    "DetectionLossComponents",
    "DiscriminatorOutputs",
    "LossWeights",
    "adaptive_weight",
    "combined_objective",
    "detection_value",
    "feature_matching_value",
    "gan_value",
    "histogram_loss",
    "DetectionBox",
    "DetectionMetrics",
    "iou",
    "match_and_score",
    "psnr",
    "rmse",
    "TileGeometry",
    "TilePlan",
    "TileRef",
    "extract_tile",
    "plan_tiles",
    "stitch",
    "ChromaMatchConfig",
    "ExternalTranslator",
    "TranslationRequest",
    "TranslationResult",
    "translate_chroma_match",
    "translate_identity",
    "__version__",
]
