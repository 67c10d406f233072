# mimo3d/core/harness/comparison.py
"""Empirical-vs-analytical CDF comparison and KS distance."""
import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import stats

from mimo3d.core.harness.errors import ComparisonError

logger = logging.getLogger(__name__)

MIN_SAMPLES = 100
DEFAULT_GRID_SIZE = 512
GRID_HEADROOM = 1.2

AnalyticalCdf = Callable[[NDArray[np.float64]], ArrayLike]


@dataclass(frozen=True)
class CdfComparison:
    grid: NDArray[np.float64]
    empirical: NDArray[np.float64]
    analytical: NDArray[np.float64]
    ks_distance: float

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.grid.tolist(), self.empirical.tolist(), self.analytical.tolist()))


def ks_critical_value(n_samples: int, significance: float = 0.01) -> float:
    """One-sample KS critical value from the exact finite-n distribution."""
    return float(stats.kstwo.ppf(1.0 - significance, n_samples))


def compare_cdf(
    samples: ArrayLike,
    analytical_cdf: AnalyticalCdf,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> CdfComparison:
    """Evaluate both CDFs on the samples pooled with a uniform grid and take the max gap.

    The gap is taken on both sides of every empirical jump, so for a continuous law the
    distance is the exact one-sample KS statistic.

    The grid spans [min(0, min sample), 1.2 * max sample].

    Raises:
        ComparisonError: Fewer than MIN_SAMPLES samples, or non-finite samples.
    """
    sample_array = np.sort(np.asarray(samples, dtype=float).ravel())
    if sample_array.size < MIN_SAMPLES:
        raise ComparisonError(f"need at least {MIN_SAMPLES} samples, got {sample_array.size}")
    if not np.all(np.isfinite(sample_array)):
        raise ComparisonError("samples contain non-finite values")

    low = min(0.0, float(sample_array[0]))
    high = GRID_HEADROOM * float(sample_array[-1])
    if high <= low:
        high = low + 1.0
    pooled = np.unique(np.concatenate([sample_array, np.linspace(low, high, grid_size)]))

    empirical = np.searchsorted(sample_array, pooled, side="right") / sample_array.size
    # Left limits of the empirical step; the gap just below a jump can be the larger one.
    empirical_left = np.searchsorted(sample_array, pooled, side="left") / sample_array.size
    analytical = np.clip(np.asarray(analytical_cdf(pooled), dtype=float), 0.0, 1.0)
    # Quadrature noise can dent monotonicity at the 1e-9 level.
    analytical = np.maximum.accumulate(analytical)

    ks_distance = float(
        max(np.max(np.abs(empirical - analytical)), np.max(np.abs(empirical_left - analytical)))
    )
    logger.info(
        f"KS distance {ks_distance:.4f} over {pooled.size} points "
        f"(1% critical value {ks_critical_value(sample_array.size):.4f})"
    )
    return CdfComparison(
        grid=pooled, empirical=empirical, analytical=analytical, ks_distance=ks_distance
    )


@dataclass(frozen=True)
class MomentRow:
    quantity: str
    monte_carlo: float
    analytical: float

    @property
    def relative_error(self) -> float:
        if self.analytical == 0.0:
            return float("inf") if self.monte_carlo != 0.0 else 0.0
        return abs(self.monte_carlo - self.analytical) / abs(self.analytical)
