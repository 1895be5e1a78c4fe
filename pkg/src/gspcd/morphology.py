"""Binary morphology with square structuring elements.

Pixels outside the raster count as ``False`` for both erosion and dilation.
A k-by-k square is separable, so each operation is a row pass followed by
a column pass of a 1-D window reduction.
"""

from __future__ import annotations

import numpy as np

from .core import BinaryMask, check_kernel


def _window_reduce(mask: np.ndarray, kernel: int, axis: int, op) -> np.ndarray:
    radius = kernel // 2
    n = mask.shape[axis]
    pad = [(0, 0), (0, 0)]
    pad[axis] = (radius, radius)
    padded = np.pad(mask, pad, mode="constant", constant_values=False)

    def shifted(offset):
        index = [slice(None), slice(None)]
        index[axis] = slice(offset, offset + n)
        return padded[tuple(index)]

    out = shifted(0).copy()
    for offset in range(1, kernel):
        op(out, shifted(offset), out=out)
    return out


def _as_mask(mask) -> np.ndarray:
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2:
        raise ValueError("mask must be 2-D")
    return mask


def erode(mask: BinaryMask, kernel: int) -> BinaryMask:
    kernel = check_kernel(kernel)
    mask = _as_mask(mask)
    if kernel == 1:
        return mask.copy()
    rows_done = _window_reduce(mask, kernel, 1, np.logical_and)
    return _window_reduce(rows_done, kernel, 0, np.logical_and)


def dilate(mask: BinaryMask, kernel: int) -> BinaryMask:
    kernel = check_kernel(kernel)
    mask = _as_mask(mask)
    if kernel == 1:
        return mask.copy()
    rows_done = _window_reduce(mask, kernel, 1, np.logical_or)
    return _window_reduce(rows_done, kernel, 0, np.logical_or)


def opening(mask: BinaryMask, kernel: int) -> BinaryMask:
    """Erosion then dilation: removes true regions that cannot hold the square."""
    return dilate(erode(mask, kernel), kernel)
