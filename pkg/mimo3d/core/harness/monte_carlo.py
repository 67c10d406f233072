# mimo3d/core/harness/monte_carlo.py
"""Seeded Monte Carlo over channel realizations.

Angles are fixed by the scenario; each trial draws fresh gains from the substream
(master_seed, GAINS, trial_index), so results don't depend on worker count or chunking.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

from mimo3d.core.antenna_array import SteeringMatrices
from mimo3d.core.channel import (
    GainVector,
    NoiseInterference,
    low_snr_mi,
    mutual_information,
    realize_channel,
    sample_gains,
)
from mimo3d.core.harness.scenario import MultiCellScenario, scenario_multicell
from mimo3d.models import ScenarioConfig
from mimo3d.utils.rng_streams import StreamPurpose, derive_generator
from mimo3d.utils.trial_pool import TrialPool

logger = logging.getLogger(__name__)

GainSampler = Callable[[int, np.random.Generator], GainVector]


@dataclass(frozen=True)
class MonteCarloSamples:
    mi: NDArray[np.float64]
    low_snr_mi: NDArray[np.float64]

    @property
    def trials(self) -> int:
        return len(self.mi)

    def mean(self) -> float:
        return float(np.mean(self.mi))

    def std(self) -> float:
        return float(np.std(self.mi, ddof=1)) if self.trials > 1 else 0.0

    def standard_error(self) -> float:
        return self.std() / np.sqrt(self.trials)


@dataclass(frozen=True)
class _TrialPayload:
    steering: SteeringMatrices
    noise_interference: NoiseInterference
    master_seed: int
    gain_sampler: GainSampler


def _run_trials(payload: _TrialPayload, indices: Sequence[int]) -> list[tuple[float, float]]:
    results = []
    for trial in indices:
        rng = derive_generator(payload.master_seed, StreamPurpose.GAINS, trial)
        alpha = payload.gain_sampler(payload.steering.n_paths, rng)
        h = realize_channel(payload.steering, alpha)
        results.append(
            (
                mutual_information(h, payload.noise_interference),
                low_snr_mi(h, payload.noise_interference),
            )
        )
    return results


def run_monte_carlo(
    config: ScenarioConfig,
    scenario: Optional[MultiCellScenario] = None,
    gain_sampler: GainSampler = sample_gains,
    workers: int = 1,
) -> MonteCarloSamples:
    """Draw config.trials channel realizations of the serving link and evaluate their MI.

    Args:
        config (ScenarioConfig): Scenario; trials and master_seed are taken from here.
        scenario (MultiCellScenario | None): Prebuilt scenario, built from config when None.
        gain_sampler (GainSampler): Draws the gains of one trial. Must be picklable when
            workers > 1.
        workers (int): Processes to spread trials over.

    Returns:
        MonteCarloSamples: Per-trial MI and low-SINR trace, in trial order.
    """
    if scenario is None:
        scenario = scenario_multicell(config)

    payload = _TrialPayload(
        steering=scenario.serving_steering,
        noise_interference=scenario.noise_interference,
        master_seed=config.master_seed,
        gain_sampler=gain_sampler,
    )
    results = TrialPool(workers=workers).map_indexed(_run_trials, payload, range(config.trials))

    mi = np.array([result[0] for result in results])
    low = np.array([result[1] for result in results])

    samples = MonteCarloSamples(mi=mi, low_snr_mi=low)
    logger.info(
        f"Monte Carlo done: {samples.trials} trials, MI mean {samples.mean():.6g} nats, "
        f"std {samples.std():.6g}"
    )
    return samples
