"""Ground scene prediction and change detection for wavelength-resolution SAR stacks."""

from .core import (BinaryMask, CdaParams, Detection, GspcdError, Image, ImageStack, Target,
                   extract_series)
from .cda import compute_threshold, detect, difference
from .evaluation import match, roc_sweep, score
from .gsp import EstimatorKind, predict_scene

__all__ = [
    "BinaryMask", "CdaParams", "Detection", "GspcdError", "Image", "ImageStack", "Target",
    "extract_series", "compute_threshold", "detect", "difference", "match", "roc_sweep",
    "score", "EstimatorKind", "predict_scene",
]
__version__ = "0.1.0"
