"""Two-phase feature pipeline: per-shard WFT ranges, a global range reduction,
then per-series first-order landscapes on the shared grid.

Shards can compute their local ranges independently and in parallel, but
the landscape grid is defined by the minimum and maximum transform values
across ALL series, so an explicit all-shards reduction sits between the
two phases.  Without it, shards would build features on inconsistent
grids and the rows would not be comparable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .series import CategoricalSeries
from .tda import landscape_grid
from .wft import SeriesRange, fast_wft_batch, next_pow2

DEFAULT_LANDSCAPE_LENGTH = 100


@dataclass(frozen=True)
class GlobalRange:
    """Minimum and maximum WFT values across all series of the dataset."""

    D_min: float
    D_max: float

    def __post_init__(self):
        if self.D_min > self.D_max:
            raise ValueError("D_min must not exceed D_max")


@dataclass(frozen=True)
class FeatureMatrix:
    """Per-series landscapes of one shard, rows in the shard's series order."""

    rows: np.ndarray
    D_min: float
    D_max: float

    def __post_init__(self):
        object.__setattr__(self, "rows", np.asarray(self.rows, dtype=np.float64))
        if self.rows.ndim != 2:
            raise ValueError("rows must be a 2-D matrix")

    @property
    def L(self) -> int:
        return self.rows.shape[1]

    def __len__(self) -> int:
        return len(self.rows)


def _padded_matrix(shard: Sequence[CategoricalSeries]) -> np.ndarray:
    t = len(shard[0].values)
    t2 = next_pow2(t)
    out = np.zeros((len(shard), t2), dtype=np.float64)
    for i, s in enumerate(shard):
        out[i, :t] = s.values
    return out


def local_ranges(shard: Sequence[CategoricalSeries]) -> list[SeriesRange]:
    """WFT value range of every series in the shard, in shard order."""
    if not len(shard):
        raise ValueError("shard must not be empty")
    coeffs = fast_wft_batch(_padded_matrix(shard))
    mins = coeffs.min(axis=1)
    maxs = coeffs.max(axis=1)
    return [SeriesRange(float(lo), float(hi)) for lo, hi in zip(mins, maxs)]


def reduce_global_range(locals_: Iterable[Sequence[SeriesRange]]) -> GlobalRange:
    """Combine per-shard range lists into the global (D_min, D_max)."""
    d_min = np.inf
    d_max = -np.inf
    seen = False
    for shard_ranges in locals_:
        for r in shard_ranges:
            seen = True
            d_min = min(d_min, r.d_min)
            d_max = max(d_max, r.d_max)
    if not seen:
        raise ValueError("no ranges to reduce")
    return GlobalRange(D_min=d_min, D_max=d_max)


def build_features(
    shard: Sequence[CategoricalSeries],
    global_range: GlobalRange,
    length: int = DEFAULT_LANDSCAPE_LENGTH,
) -> FeatureMatrix:
    """Length-`length` landscape of every series in the shard on the global grid.

    Raises ValueError if any series range falls outside the global range,
    which signals a stale reduction.
    """
    if not len(shard):
        raise ValueError("shard must not be empty")
    grid = landscape_grid(global_range.D_min, global_range.D_max, length)
    coeffs = fast_wft_batch(_padded_matrix(shard))
    mins = coeffs.min(axis=1)
    maxs = coeffs.max(axis=1)
    if mins.min() < global_range.D_min or maxs.max() > global_range.D_max:
        raise ValueError("series range outside the global range; recompute the reduction")
    rows = np.minimum(grid[None, :] - mins[:, None], maxs[:, None] - grid[None, :])
    np.maximum(rows, 0.0, out=rows)
    return FeatureMatrix(rows=rows, D_min=global_range.D_min, D_max=global_range.D_max)


def save_feature_csv(matrix: FeatureMatrix, path) -> None:
    """Dump landscape rows for audit; row order is the shard's series order."""
    np.savetxt(path, matrix.rows, fmt="%.17g", delimiter=",")
