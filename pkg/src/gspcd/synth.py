"""Deterministic synthetic image stacks with planted targets.

Random numbers come from the PCG64 generator (PCG XSL-RR 128/64) seeded
through numpy's ``SeedSequence``. Raw 64-bit outputs are mapped to uniform
doubles in [0, 1) as ``(x >> 11) * 2**-53``. The draw order is fixed: one
uniform per pixel for the clutter field, then one per pixel for each image's
jitter in image order. Only uniforms are drawn, so the stream depends on the
bit generator alone and not on numpy's distribution code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.ndimage import uniform_filter

from .core import DEFAULT_PIXEL_SPACING_M, Image, ImageStack, Target


@dataclass(frozen=True)
class SynthTarget:
    image_index: int
    row: float
    col: float
    size_px: int = 10
    amplitude_boost: float = 0.5
    id: str = ""


@dataclass(frozen=True)
class SynthConfig:
    rows: int = 300
    cols: int = 200
    n_images: int = 8
    seed: int = 0
    clutter_mean: float = 0.14
    clutter_std: float = 0.07
    clutter_correlation_px: float = 3.0
    temporal_jitter_std: float = 0.01
    targets: tuple[SynthTarget, ...] = field(default_factory=tuple)
    pixel_spacing_m: float = DEFAULT_PIXEL_SPACING_M

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if self.rows < 1 or self.cols < 1:
            raise ValueError("rows and cols must be positive")
        if self.n_images < 2:
            raise ValueError("n_images must be at least 2")
        if self.clutter_std < 0 or self.temporal_jitter_std < 0 or self.clutter_correlation_px < 0:
            raise ValueError("standard deviations and correlation radius must be non-negative")
        for t in self.targets:
            if not 0 <= t.image_index < self.n_images:
                raise ValueError(f"target image_index {t.image_index} out of range")
            if not (0 <= t.row < self.rows and 0 <= t.col < self.cols):
                raise ValueError(f"target at ({t.row}, {t.col}) outside the scene")
            if t.size_px < 1:
                raise ValueError("target size_px must be >= 1")
            if not t.amplitude_boost > 0:
                raise ValueError("amplitude_boost must be positive")


class SynthResult(NamedTuple):
    stack: ImageStack
    targets: list[list[Target]]  # per image
    clutter: Image  # target-free, jitter-free ground truth scene


def uniform_stream(seed: int):
    bitgen = np.random.PCG64(seed)

    def draw(n: int) -> np.ndarray:
        raw = bitgen.random_raw(n)
        return (raw >> np.uint64(11)).astype(np.float64) * 2.0 ** -53

    return draw


def _clutter_field(cfg: SynthConfig, draw) -> np.ndarray:
    noise = draw(cfg.rows * cfg.cols).reshape(cfg.rows, cfg.cols)
    radius = int(round(cfg.clutter_correlation_px))
    if radius > 0:
        noise = uniform_filter(noise, size=2 * radius + 1, mode="reflect")
    spread = noise.std()
    z = (noise - noise.mean()) / spread if spread > 0 else np.zeros_like(noise)
    return np.maximum(cfg.clutter_mean + cfg.clutter_std * z, 0.0)


def _stamp(image: np.ndarray, t: SynthTarget) -> None:
    """Add a flat square of ``amplitude_boost`` with a half-amplitude 1-pixel rim."""
    r0 = int(math.floor(t.row - t.size_px / 2 + 0.5))
    c0 = int(math.floor(t.col - t.size_px / 2 + 0.5))
    rows, cols = image.shape
    rim = (slice(max(r0 - 1, 0), max(min(r0 + t.size_px + 1, rows), 0)),
           slice(max(c0 - 1, 0), max(min(c0 + t.size_px + 1, cols), 0)))
    core = (slice(max(r0, 0), max(min(r0 + t.size_px, rows), 0)),
            slice(max(c0, 0), max(min(c0 + t.size_px, cols), 0)))
    image[rim] += t.amplitude_boost / 2
    image[core] += t.amplitude_boost / 2


def generate(config: SynthConfig) -> SynthResult:
    draw = uniform_stream(config.seed)
    clutter = _clutter_field(config, draw)
    half_width = math.sqrt(3.0) * config.temporal_jitter_std

    layers = []
    for _ in range(config.n_images):
        jitter = (2.0 * draw(config.rows * config.cols) - 1.0) * half_width
        layers.append(np.maximum(clutter + jitter.reshape(clutter.shape), 0.0))

    per_image: list[list[Target]] = [[] for _ in range(config.n_images)]
    for k, t in enumerate(config.targets):
        _stamp(layers[t.image_index], t)
        per_image[t.image_index].append(Target(t.id or f"t{k:03d}", float(t.row), float(t.col)))

    stack = ImageStack(tuple(Image(layer, config.pixel_spacing_m) for layer in layers))
    return SynthResult(stack, per_image, Image(clutter, config.pixel_spacing_m))


def target_grid(n_targets: int, rows: int, cols: int, spacing_px: float = 20.0):
    """Target centres on a near-square grid, centred in the scene."""
    if n_targets < 1:
        return []
    n_cols = math.ceil(math.sqrt(n_targets))
    n_rows = math.ceil(n_targets / n_cols)
    r_first = (rows - (n_rows - 1) * spacing_px) / 2
    c_first = (cols - (n_cols - 1) * spacing_px) / 2
    return [(r_first + (k // n_cols) * spacing_px, c_first + (k % n_cols) * spacing_px)
            for k in range(n_targets)]


def default_scenario(rows: int = 300, cols: int = 200, n_images: int = 8, seed: int = 0,
                     n_targets: int = 25, target_images: tuple[int, ...] = (0, 1),
                     size_px: int = 10, amplitude_boost: float = 0.5,
                     spacing_px: float = 20.0) -> SynthConfig:
    """Desk-scale stand-in for one field stack.

    ``n_targets`` vehicles, 50 m apart at 2.5 m pixels, appear at the same
    positions in each of ``target_images``; the first of those is the
    surveillance image.
    """
    targets = []
    for k, (r, c) in enumerate(target_grid(n_targets, rows, cols, spacing_px)):
        for idx in target_images:
            targets.append(SynthTarget(idx, r, c, size_px, amplitude_boost, id=f"t{k + 1:02d}"))
    return SynthConfig(rows=rows, cols=cols, n_images=n_images, seed=seed, targets=tuple(targets))
