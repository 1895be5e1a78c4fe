"""Per-pixel ground scene prediction (GSP) from an image stack.

Every estimator treats axis 0 as the series axis, so the same function
handles a single pixel series of shape ``(N,)`` and a block of the stack of
shape ``(N, rows, cols)``. Sums over the series run in a fixed sequential
order, which keeps a pixel's result identical whether it is computed alone
or as part of any block.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_toeplitz

from .core import GspcdError, Image, ImageStack

ESTIMATORS = ("ar", "trimmed", "median", "mean", "intensity")


class EstimatorError(GspcdError, ValueError):
    """Invalid estimator arguments, optionally tagged with a pixel position."""

    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        if row is not None:
            message = f"{message} (at pixel row={row}, col={col})"
        super().__init__(message)
        self.row = row
        self.col = col


@dataclass(frozen=True)
class EstimatorKind:
    """Estimator choice plus its parameters.

    ``alpha`` only matters for ``trimmed`` and ``centered`` only for ``ar``.
    The AR order is fixed at 1.
    """

    name: str
    alpha: float = 0.3
    centered: bool = False
    order: int = 1

    def __post_init__(self):
        if self.name not in ESTIMATORS:
            raise EstimatorError(f"unknown estimator {self.name!r}; choose from {ESTIMATORS}")
        if not 0.0 <= self.alpha < 0.5:
            raise EstimatorError(f"alpha must lie in [0, 0.5), got {self.alpha}")
        if self.order != 1:
            raise EstimatorError("only AR order p = 1 is supported for scene prediction")


@dataclass(frozen=True)
class ArFit:
    coefficients: tuple[float, ...]
    autocorr: tuple[float, ...]
    center: float = 0.0

    @property
    def order(self) -> int:
        return len(self.coefficients)


def _seq_sum(y: np.ndarray, start: int = 0, stop: int | None = None) -> np.ndarray:
    stop = y.shape[0] if stop is None else stop
    acc = np.array(y[start], dtype=np.float64, copy=True)
    for n in range(start + 1, stop):
        acc += y[n]
    return acc


def _as_series(values) -> np.ndarray:
    y = np.asarray(values, dtype=np.float64)
    if y.ndim < 1 or y.shape[0] < 1:
        raise EstimatorError("series must contain at least one sample")
    return y


# -- order statistics and moments ---------------------------------------------

def mean_estimate(series) -> np.ndarray | float:
    """Sample mean, summed in ascending order so stack order cannot change the result."""
    y = np.sort(_as_series(series), axis=0)
    return _seq_sum(y) / y.shape[0]


def median_estimate(series):
    y = np.sort(_as_series(series), axis=0)
    n = y.shape[0]
    if n % 2:
        return y[n // 2].copy()
    return (y[n // 2 - 1] + y[n // 2]) / 2


def trim_count(n: int, alpha: float) -> int:
    """Number of samples removed from each end: ``floor((N - 1) * alpha)``."""
    if not 0.0 <= alpha < 0.5:
        raise EstimatorError(f"alpha must lie in [0, 0.5), got {alpha}")
    m = math.floor((n - 1) * alpha)
    if n - 2 * m < 1:
        raise EstimatorError(f"trimming {m} samples from each end of N={n} leaves nothing")
    return m


def trimmed_mean_estimate(series, alpha: float):
    """Mean of the sorted samples with ``m`` dropped from each end.

    Normalised by the number of retained samples, ``N - 2m``.
    """
    y = _as_series(series)
    n = y.shape[0]
    m = trim_count(n, alpha)
    y = np.sort(y, axis=0)
    return _seq_sum(y, m, n - m) / (n - 2 * m)


def intensity_mean_estimate(series):
    y = _as_series(series)
    return np.sqrt(_seq_sum(y * y) / y.shape[0])


# -- autoregressive model -------------------------------------------------------

def sample_autocorrelation(series, max_lag: int):
    """Biased sample autocorrelation of the raw (uncentered) samples.

    ``r[k] = (1/N) * sum_{n} y[n] * y[n+k]`` for ``k = 0..max_lag``. Returns a
    list of length ``max_lag + 1``; entries are arrays when ``series`` is a
    stack block.
    """
    y = _as_series(series)
    n = y.shape[0]
    if not 0 <= max_lag < n:
        raise EstimatorError(f"max_lag must be in [0, N) with N={n}, got {max_lag}")
    return [_seq_sum(y[: n - k] * y[k:]) / n for k in range(max_lag + 1)]


def fit_ar(series, p: int = 1, centered: bool = False) -> ArFit:
    """Yule-Walker fit of an AR(p) model to a single pixel series.

    Coefficients follow the sign convention
    ``y[n] = -sum_k a[k] y[n-k] + u[n]``, so AR(1) gives ``a[1] = -r[1]/r[0]``.
    An identically zero series (``r[0] == 0``) yields all-zero coefficients.
    """
    y = _as_series(series)
    if y.ndim != 1:
        raise EstimatorError("fit_ar expects a 1-D series")
    if not 1 <= p < y.shape[0]:
        raise EstimatorError(f"AR order must satisfy 1 <= p < N, got p={p}, N={y.shape[0]}")
    center = float(mean_estimate(y)) if centered else 0.0
    r = [float(v) for v in sample_autocorrelation(y - center, p)]
    if r[0] == 0.0:
        return ArFit((0.0,) * p, tuple(r), center)
    if p == 1:
        coeffs = (-r[1] / r[0],)
    else:
        coeffs = tuple(float(a) for a in solve_toeplitz(r[:p], -np.asarray(r[1:])))
    return ArFit(coeffs, tuple(r), center)


def ar_forecast(series, fit: ArFit) -> float:
    """One-step-ahead forecast ``-sum_k a[k] * y[N+1-k]``."""
    y = _as_series(series) - fit.center
    if y.shape[0] < fit.order:
        raise EstimatorError("series is shorter than the AR order")
    total = 0.0
    for k, a in enumerate(fit.coefficients, start=1):
        total -= a * y[-k]
    return total + fit.center


def ar1_forecast(series, centered: bool = False):
    """Vectorised AR(1) Yule-Walker one-step forecast along axis 0."""
    y = _as_series(series)
    n = y.shape[0]
    if n < 2:
        raise EstimatorError("AR(1) needs at least 2 samples")
    center = mean_estimate(y) if centered else 0.0
    if centered:
        y = y - center
    r0, r1 = sample_autocorrelation(y, 1)
    zero = r0 == 0
    phi = np.divide(r1, np.where(zero, 1.0, r0))
    phi = np.where(zero, 0.0, phi)
    return phi * y[-1] + center


# -- whole-image driver ---------------------------------------------------------

def estimate(series, kind: EstimatorKind):
    """Apply the estimator selected by ``kind`` along axis 0 of ``series``."""
    if kind.name == "mean":
        return mean_estimate(series)
    if kind.name == "median":
        return median_estimate(series)
    if kind.name == "trimmed":
        return trimmed_mean_estimate(series, kind.alpha)
    if kind.name == "intensity":
        return intensity_mean_estimate(series)
    return ar1_forecast(series, kind.centered)


def _row_blocks(rows: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, rows))
    edges = np.linspace(0, rows, workers + 1).round().astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def predict_scene(stack: ImageStack, kind: EstimatorKind, threads: int = 1) -> Image:
    """Predict the static ground scene by estimating every pixel series.

    Rows are split into ``threads`` blocks processed concurrently. Every
    pixel is computed independently, so the result does not depend on
    ``threads``.
    """
    data = stack.data

    def run(block):
        r0, r1 = block
        try:
            return np.asarray(estimate(data[:, r0:r1, :], kind), dtype=np.float64)
        except EstimatorError as exc:
            raise EstimatorError(str(exc), row=r0, col=0) from None

    blocks = _row_blocks(stack.rows, threads)
    if len(blocks) == 1:
        parts = [run(blocks[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(blocks)) as pool:
            parts = list(pool.map(run, blocks))
    return Image(np.concatenate(parts, axis=0), stack.pixel_spacing_m)
