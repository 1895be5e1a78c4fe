"""Domain types shared across the package.

Images are stored as read-only 2-D float64 arrays indexed ``(row, col)`` with
the origin at the top-left pixel. Binary masks are plain 2-D ``bool`` arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_PIXEL_SPACING_M = 2.5

# A boolean raster with the same shape as the image it refers to.
BinaryMask = np.ndarray


class GspcdError(Exception):
    """Base class for errors raised by this package."""


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class Image:
    """Single-channel amplitude raster.

    ``data`` is copied into a read-only float64 array; NaN or Inf pixels are
    rejected at construction.
    """

    data: np.ndarray
    pixel_spacing_m: float = DEFAULT_PIXEL_SPACING_M

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64, copy=True)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"image must be a non-empty 2-D array, got shape {data.shape}")
        if not np.isfinite(data).all():
            bad = np.argwhere(~np.isfinite(data))[0]
            raise ValueError(f"non-finite pixel at (row={bad[0]}, col={bad[1]})")
        if not self.pixel_spacing_m > 0:
            raise ValueError("pixel_spacing_m must be positive")
        object.__setattr__(self, "data", _frozen(data))
        object.__setattr__(self, "pixel_spacing_m", float(self.pixel_spacing_m))

    @classmethod
    def from_flat(cls, rows: int, cols: int, pixels: Iterable[float],
                  pixel_spacing_m: float = DEFAULT_PIXEL_SPACING_M) -> "Image":
        flat = np.asarray(list(pixels) if not isinstance(pixels, np.ndarray) else pixels,
                          dtype=np.float64)
        if flat.size != rows * cols:
            raise ValueError(f"expected {rows * cols} pixels, got {flat.size}")
        return cls(flat.reshape(rows, cols), pixel_spacing_m)

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    @property
    def pixels(self) -> np.ndarray:
        """Flat row-major view of the pixel values."""
        return self.data.reshape(-1)

    @property
    def area_km2(self) -> float:
        return self.rows * self.cols * self.pixel_spacing_m ** 2 / 1e6

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return (self.pixel_spacing_m == other.pixel_spacing_m
                and self.shape == other.shape
                and np.array_equal(self.data, other.data))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class ImageStack:
    """N >= 2 co-registered images held as one ``(N, rows, cols)`` array."""

    images: tuple[Image, ...]
    data: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        images = tuple(self.images)
        if len(images) < 2:
            raise ValueError(f"an image stack needs at least 2 images, got {len(images)}")
        first = images[0]
        for i, img in enumerate(images[1:], start=1):
            if img.shape != first.shape:
                raise ValueError(f"image {i} has shape {img.shape}, expected {first.shape}")
            if img.pixel_spacing_m != first.pixel_spacing_m:
                raise ValueError(f"image {i} pixel spacing differs from image 0")
        object.__setattr__(self, "images", images)
        object.__setattr__(self, "data", _frozen(np.stack([img.data for img in images])))

    @classmethod
    def from_array(cls, data: np.ndarray,
                   pixel_spacing_m: float = DEFAULT_PIXEL_SPACING_M) -> "ImageStack":
        data = np.asarray(data)
        if data.ndim != 3:
            raise ValueError("stack array must be 3-D (N, rows, cols)")
        return cls(tuple(Image(layer, pixel_spacing_m) for layer in data))

    def __len__(self):
        return len(self.images)

    @property
    def n(self) -> int:
        return len(self.images)

    @property
    def rows(self) -> int:
        return self.data.shape[1]

    @property
    def cols(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[1:]

    @property
    def pixel_spacing_m(self) -> float:
        return self.images[0].pixel_spacing_m


@dataclass(frozen=True)
class Target:
    id: str
    row: float
    col: float


@dataclass(frozen=True)
class Detection:
    """A connected change object.

    ``bounding_box`` is ``(min_row, min_col, max_row, max_col)``, inclusive.
    """

    centroid_row: float
    centroid_col: float
    pixel_count: int
    bounding_box: tuple[int, int, int, int]

    def __post_init__(self):
        if self.pixel_count < 1:
            raise ValueError("pixel_count must be >= 1")
        r0, c0, r1, c1 = self.bounding_box
        if not (r0 <= self.centroid_row <= r1 and c0 <= self.centroid_col <= c1):
            raise ValueError("centroid lies outside the bounding box")


@dataclass(frozen=True)
class CdaParams:
    c_constant: float
    opening_kernel: int = 3
    dilation_kernel: int = 7
    connectivity: int = 8

    def __post_init__(self):
        if not self.c_constant >= 0:
            raise ValueError("c_constant must be non-negative")
        for name in ("opening_kernel", "dilation_kernel"):
            check_kernel(getattr(self, name), name)
        if self.connectivity not in (4, 8):
            raise ValueError("connectivity must be 4 or 8")


def check_kernel(kernel: int, name: str = "kernel") -> int:
    if int(kernel) != kernel or kernel < 1 or kernel % 2 == 0:
        raise ValueError(f"{name} must be an odd integer >= 1, got {kernel!r}")
    return int(kernel)


def extract_series(stack: ImageStack, row: int, col: int) -> np.ndarray:
    """Return the N samples at ``(row, col)`` in stack order."""
    if not (0 <= row < stack.rows and 0 <= col < stack.cols):
        raise IndexError(f"pixel ({row}, {col}) outside {stack.rows}x{stack.cols} stack")
    return stack.data[:, row, col].copy()


def require_same_shape(*arrays: Sequence, names: Sequence[str] | None = None) -> None:
    shapes = [np.shape(a.data if isinstance(a, Image) else a) for a in arrays]
    if len(set(shapes)) > 1:
        label = ", ".join(f"{n}={s}" for n, s in zip(names or range(len(shapes)), shapes))
        raise ValueError(f"dimension mismatch: {label}")
