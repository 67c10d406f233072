# mimo3d/core/harness/sweep.py
"""Serving-BS downtilt sweep on the analytical MI distribution.

Path angles and interference stay fixed; only the serving A is rebuilt per tilt. With one receive
port the exact law is used, otherwise the Gaussian approximation. compare_tilt adds a Monte Carlo
check of the law at a single tilt.
"""
import logging
import math
from dataclasses import dataclass, replace
from mimo3d._compat import StrEnum
from functools import partial
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from mimo3d.core.antenna_array import SteeringMatrices
from mimo3d.core.asymptotic_dist import (
    build_kernels,
    build_mean_matrices,
    build_moments,
    realify_kernels,
    theorem4_cdf,
    theorem4_params,
    theorem4_quantile,
)
from mimo3d.core.exact_dist import (
    build_exact_kernel,
    kernel_spectrum,
    theorem1_cdf,
    theorem1_mean,
    theorem1_quantile,
)
from mimo3d.core.harness.comparison import CdfComparison, compare_cdf
from mimo3d.core.harness.errors import HarnessError
from mimo3d.core.harness.monte_carlo import run_monte_carlo
from mimo3d.core.harness.scenario import MultiCellScenario, retilt_serving, scenario_multicell
from mimo3d.models import ScenarioConfig, TiltConfig
from mimo3d.utils.trial_pool import TrialPool

logger = logging.getLogger(__name__)

DEFAULT_CDF_LEVEL = 0.1


class SweepMetric(StrEnum):
    MEAN_MI = "mean_mi"
    CDF_LEVEL = "cdf_level"


@dataclass(frozen=True)
class SweepRow:
    tilt_deg: float
    mean_mi_nats: float
    mi_at_cdf_level: float


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[SweepRow, ...]
    metric: SweepMetric
    level: float

    def metric_values(self) -> np.ndarray:
        if self.metric == SweepMetric.MEAN_MI:
            return np.array([row.mean_mi_nats for row in self.rows])
        return np.array([row.mi_at_cdf_level for row in self.rows])

    @property
    def argmax_tilt_deg(self) -> float:
        return self.rows[int(np.argmax(self.metric_values()))].tilt_deg


@dataclass(frozen=True)
class TiltLaw:
    """Analytical MI law of the serving link at one tilt."""

    mean_mi: float
    quantile: Callable[[float], float]
    cdf: Callable[[NDArray[np.float64]], ArrayLike]


def tilt_law(scenario: MultiCellScenario, steering: SteeringMatrices) -> TiltLaw:
    """Exact law with one receive port, the Gaussian approximation otherwise."""
    config = scenario.config
    ni = scenario.noise_interference
    if config.n_ms == 1:
        spectrum = kernel_spectrum(build_exact_kernel(steering, ni))
        return TiltLaw(
            mean_mi=theorem1_mean(spectrum),
            quantile=partial(theorem1_quantile, spectrum),
            cdf=partial(theorem1_cdf, spectrum),
        )

    realified = realify_kernels(build_kernels(steering))
    approx = theorem4_params(
        build_moments(realified, ni, config.n_paths),
        build_mean_matrices(realified, ni, config.n_paths),
        ni,
        enforce_nondegenerate=False,
    )
    return TiltLaw(
        mean_mi=approx.mu,
        quantile=partial(theorem4_quantile, approx, config.n_paths),
        cdf=partial(theorem4_cdf, approx, config.n_paths),
    )


def _serving_tilt(scenario: MultiCellScenario, tilt_deg: float) -> TiltConfig:
    return TiltConfig.uniform(math.radians(tilt_deg), scenario.config.n_bs)


def evaluate_tilt(scenario: MultiCellScenario, tilt_deg: float, level: float) -> SweepRow:
    """Mean MI and the MI at a CDF level for one common serving tilt."""
    law = tilt_law(scenario, retilt_serving(scenario, _serving_tilt(scenario, tilt_deg)))
    at_level = law.quantile(level)
    logger.debug(f"tilt {tilt_deg:.2f} deg: mean MI {law.mean_mi:.6g}, MI@{level:g} {at_level:.6g}")
    return SweepRow(tilt_deg=float(tilt_deg), mean_mi_nats=law.mean_mi, mi_at_cdf_level=at_level)


def compare_tilt(scenario: MultiCellScenario, tilt_deg: float, workers: int = 1) -> CdfComparison:
    """Monte Carlo MI at one serving tilt against that tilt's analytical law."""
    tilts = _serving_tilt(scenario, tilt_deg)
    steering = retilt_serving(scenario, tilts)
    retilted = replace(scenario, serving=replace(scenario.serving, tilts=tilts, steering=steering))
    samples = run_monte_carlo(scenario.config, scenario=retilted, workers=workers)
    comparison = compare_cdf(samples.mi, tilt_law(scenario, steering).cdf)
    logger.info(f"tilt {tilt_deg:g} deg: Monte Carlo KS {comparison.ks_distance:.4f}")
    return comparison


def _evaluate_tilts(
    payload: tuple[MultiCellScenario, Sequence[float], float], indices: Sequence[int]
) -> list[SweepRow]:
    scenario, grid, level = payload
    return [evaluate_tilt(scenario, grid[index], level) for index in indices]


def sweep_tilt(
    config: ScenarioConfig,
    tilt_grid_deg: Sequence[float],
    metric: SweepMetric = SweepMetric.MEAN_MI,
    level: float = DEFAULT_CDF_LEVEL,
    scenario: Optional[MultiCellScenario] = None,
    workers: int = 1,
) -> SweepTable:
    """Evaluate every tilt of the grid and pick the best one by metric.

    Raises:
        HarnessError: On an empty grid or a level outside (0, 1).
    """
    grid = [float(tilt) for tilt in tilt_grid_deg]
    if not grid:
        raise HarnessError("tilt grid is empty")
    if not 0.0 < level < 1.0:
        raise HarnessError(f"CDF level must be in (0, 1), got {level}")
    if scenario is None:
        scenario = scenario_multicell(config)

    rows = TrialPool(workers=workers).map_indexed(
        _evaluate_tilts, (scenario, grid, level), range(len(grid))
    )
    table = SweepTable(rows=tuple(rows), metric=metric, level=level)
    logger.info(
        f"Tilt sweep over {len(grid)} points: best {metric} at {table.argmax_tilt_deg:.2f} deg"
    )
    return table


def tilt_grid(start_deg: float, stop_deg: float, step_deg: float) -> list[float]:
    """Inclusive grid from start to stop."""
    if step_deg <= 0.0:
        raise HarnessError(f"step must be positive, got {step_deg}")
    count = int(math.floor((stop_deg - start_deg) / step_deg + 1e-9)) + 1
    return [round(start_deg + index * step_deg, 10) for index in range(max(count, 0))]
