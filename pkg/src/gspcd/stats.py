"""Descriptive statistics and prediction quality measures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .core import BinaryMask, GspcdError, Image, Target, require_same_shape

DEFAULT_HALF_WINDOW = 5


class ZeroVarianceError(GspcdError, ValueError):
    pass


@dataclass(frozen=True)
class DescriptiveStats:
    average: float
    std_dev: float
    skewness: float
    kurtosis: float  # non-excess: a Gaussian scores 3


@dataclass(frozen=True)
class QualityMeasures:
    mse: float
    mape: float
    mdae: float
    pixels_used: int


def _values(image) -> np.ndarray:
    data = image.data if isinstance(image, Image) else np.asarray(image, dtype=np.float64)
    return data.reshape(-1)


def describe(image) -> DescriptiveStats:
    """Mean, sample std (ddof=1), skewness and kurtosis of all pixels.

    Skewness and kurtosis use the biased central moments (divisor Q).
    """
    x = _values(image)
    q = x.size
    if q < 2:
        raise ZeroVarianceError("need at least 2 pixels")
    average = float(x.mean())
    dev = x - average
    dev2 = dev * dev
    m2 = float(dev2.mean())
    if m2 == 0.0:
        raise ZeroVarianceError("zero variance: skewness and kurtosis are undefined")
    m3 = float((dev2 * dev).mean())
    m4 = float((dev2 * dev2).mean())
    std_dev = float(np.sqrt(m2 * q / (q - 1)))
    return DescriptiveStats(average, std_dev, m3 / m2 ** 1.5, m4 / (m2 * m2))


def exclusion_mask(targets: Sequence[Target], rows: int, cols: int,
                   half_window: int = DEFAULT_HALF_WINDOW) -> BinaryMask:
    """Mark a ``(2*half_window + 1)``-square around each target, clipped to bounds."""
    if half_window < 0:
        raise ValueError("half_window must be >= 0")
    mask = np.zeros((rows, cols), dtype=bool)
    for t in targets:
        r = int(np.floor(t.row + 0.5))
        c = int(np.floor(t.col + 0.5))
        r0, r1 = max(r - half_window, 0), min(r + half_window + 1, rows)
        c0, c1 = max(c - half_window, 0), min(c + half_window + 1, cols)
        if r0 < r1 and c0 < c1:
            mask[r0:r1, c0:c1] = True
    return mask


def quality(interest, predicted, excluded: BinaryMask | None = None) -> QualityMeasures:
    """MSE, MAPE and MdAE of ``predicted`` against ``interest``.

    Pixels set in ``excluded`` are ignored. MAPE additionally skips pixels
    whose interest value is zero.
    """
    x = interest.data if isinstance(interest, Image) else np.asarray(interest, dtype=np.float64)
    xh = predicted.data if isinstance(predicted, Image) else np.asarray(predicted, dtype=np.float64)
    if excluded is None:
        excluded = np.zeros(x.shape, dtype=bool)
    require_same_shape(x, xh, excluded, names=("interest", "predicted", "excluded"))
    keep = ~np.asarray(excluded, dtype=bool)
    x, xh = x[keep], xh[keep]
    if x.size == 0:
        raise ValueError("no pixels left after exclusion")
    abs_err = np.abs(x - xh)
    nonzero = x != 0
    # an all-zero interest image leaves MAPE with no terms; report 0
    mape = float(np.mean(abs_err[nonzero] / np.abs(x[nonzero]))) if nonzero.any() else 0.0
    return QualityMeasures(
        mse=float(np.mean(abs_err * abs_err)),
        mape=mape,
        mdae=float(np.median(abs_err)),
        pixels_used=int(x.size),
    )
