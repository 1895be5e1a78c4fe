"""Change detection against a predicted ground scene.

Pipeline: ``surveillance - reference`` -> one-sided threshold at
``mean + C * std`` of the difference -> opening (3x3) -> dilation (7x7)
-> connected components.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import BinaryMask, CdaParams, Detection, Image, require_same_shape
from .labeling import connected_components
from .morphology import dilate, opening


@dataclass(frozen=True)
class ThresholdSpec:
    c_constant: float
    mu_hat: float
    sigma_hat: float
    lam: float

    @classmethod
    def from_moments(cls, c_constant: float, mu_hat: float, sigma_hat: float) -> "ThresholdSpec":
        if sigma_hat < 0:
            raise ValueError("sigma_hat must be non-negative")
        return cls(float(c_constant), float(mu_hat), float(sigma_hat),
                   float(mu_hat + c_constant * sigma_hat))


def difference(surveillance: Image, reference: Image) -> Image:
    """Pixel-wise ``surveillance - reference``; new bright objects come out positive."""
    require_same_shape(surveillance, reference, names=("surveillance", "reference"))
    return Image(surveillance.data - reference.data, surveillance.pixel_spacing_m)


def difference_moments(diff: Image) -> tuple[float, float]:
    x = diff.data
    if x.size < 2:
        return float(x.mean()), 0.0
    return float(x.mean()), float(x.std(ddof=1))


def compute_threshold(diff: Image, c_constant: float) -> ThresholdSpec:
    mu, sigma = difference_moments(diff)
    return ThresholdSpec.from_moments(c_constant, mu, sigma)


def apply_threshold(diff: Image, spec: ThresholdSpec) -> BinaryMask:
    return diff.data > spec.lam


def change_mask(diff: Image, spec: ThresholdSpec, params: CdaParams) -> BinaryMask:
    """Thresholded difference after opening and dilation."""
    mask = apply_threshold(diff, spec)
    return dilate(opening(mask, params.opening_kernel), params.dilation_kernel)


def detect(surveillance: Image, reference: Image, params: CdaParams) -> list[Detection]:
    diff = difference(surveillance, reference)
    spec = compute_threshold(diff, params.c_constant)
    return connected_components(change_mask(diff, spec, params), params.connectivity)


def detect_sweep(surveillance: Image, reference: Image, c_values, params: CdaParams):
    """Run ``detect`` for each threshold constant, sharing the difference image.

    Returns a list of ``(ThresholdSpec, detections, mask)`` in ``c_values`` order.
    """
    diff = difference(surveillance, reference)
    mu, sigma = difference_moments(diff)
    out = []
    for c in c_values:
        spec = ThresholdSpec.from_moments(c, mu, sigma)
        mask = change_mask(diff, spec, params)
        out.append((spec, connected_components(mask, params.connectivity), mask))
    return out
