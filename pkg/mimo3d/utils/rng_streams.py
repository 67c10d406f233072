# mimo3d/utils/rng_streams.py
"""Labelled random substreams.

Every random quantity in a run is drawn from a numpy Generator whose SeedSequence is derived from
the master seed plus a fixed tuple of labels. The first label names the purpose (angles, gains,
interferer gains, oracle draws), the following ones index within that purpose (site, marginal,
trial). Streams never cross purposes and a given (master_seed, labels) pair always yields the same
draws, regardless of process count or scheduling order.

Usage:
    rng = derive_generator(config.master_seed, StreamPurpose.GAINS, trial_index)
    seq = derive_seed_sequence(config.master_seed, StreamPurpose.ANGLES, site_index)
"""

from enum import IntEnum

import numpy as np


class StreamPurpose(IntEnum):
    ANGLES = 1
    GAINS = 2
    INTERFERER_GAINS = 3
    MOMENT_ORACLE = 4


class AngleMarginal(IntEnum):
    DEPART_AZIMUTH = 0
    DEPART_ELEVATION = 1
    ARRIVE_AZIMUTH = 2
    ARRIVE_ELEVATION = 3


def derive_seed_sequence(master_seed: int, *labels: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(l) for l in labels))


def child_seed_sequence(parent: np.random.SeedSequence, label: int) -> np.random.SeedSequence:
    """Extend an existing SeedSequence by one more label."""
    return np.random.SeedSequence(
        entropy=parent.entropy, spawn_key=tuple(parent.spawn_key) + (int(label),)
    )


def derive_generator(master_seed: int, *labels: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed_sequence(master_seed, *labels))
