# mimo3d/core/geometry.py
"""Scenario geometry and path-angle generation.

LoS elevation angles come from the BS/MS layout. Path angles (departure and arrival, azimuth and
elevation) are drawn once per scenario from the standardized spectra and reused across every
channel realization:

    - elevation: Laplacian, density proportional to exp(-sqrt(2)|theta - theta0| / sigma), so
      sigma is the standard deviation; samples outside [0, pi] are redrawn.
    - azimuth: Von Mises(mu, kappa), wrapped to (-pi, pi].

Each of the four marginals draws from its own labelled substream of the caller's SeedSequence, so
adding paths to one marginal never shifts another.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.typing import NDArray
from scipy import stats

from mimo3d.models import AngularSpectrumParams, SitePlacement, SpectraConfig
from mimo3d.utils.rng_streams import AngleMarginal, child_seed_sequence

logger = logging.getLogger(__name__)

PATH_ANGLE_CACHE_SIZE = 256


class GeometryError(Exception):
    pass


class GeometryDomainError(GeometryError):
    """MS directly under the BS, or an otherwise undefined angle."""


@dataclass(frozen=True)
class PathAngles:
    """Per-path angles in radians; index n pairs AoD n with AoA n."""

    depart_azimuth: NDArray[np.float64]
    depart_elevation: NDArray[np.float64]
    arrive_azimuth: NDArray[np.float64]
    arrive_elevation: NDArray[np.float64]

    def __post_init__(self):
        arrays = (
            self.depart_azimuth,
            self.depart_elevation,
            self.arrive_azimuth,
            self.arrive_elevation,
        )
        lengths = {len(a) for a in arrays}
        if len(lengths) != 1 or 0 in lengths:
            raise GeometryError(f"angle arrays must share a positive length, got {lengths}")
        for elevation in (self.depart_elevation, self.arrive_elevation):
            if np.any(elevation < 0.0) or np.any(elevation > np.pi):
                raise GeometryError("elevations must lie in [0, pi]")
        for azimuth in (self.depart_azimuth, self.arrive_azimuth):
            if np.any(azimuth <= -np.pi) or np.any(azimuth > np.pi):
                raise GeometryError("azimuths must lie in (-pi, pi]")
        for array in arrays:
            array.setflags(write=False)

    @property
    def n_paths(self) -> int:
        return len(self.depart_azimuth)


def los_elevation_angle(placement: SitePlacement) -> float:
    """Elevation of the BS-to-MS line of sight, measured from zenith (pi/2 is horizontal).

    Args:
        placement (SitePlacement): The BS-MS link.

    Returns:
        float: theta_LoS in radians; above pi/2 when the BS is higher than the MS.

    Raises:
        GeometryDomainError: If the MS sits directly under the BS.
    """
    distance = placement.horizontal_distance
    if distance <= 0.0:
        raise GeometryDomainError("zero horizontal distance between BS and MS")
    return math.pi / 2.0 - math.atan(placement.height_difference / distance)


def angular_spectrum_for_site(
    placement: SitePlacement, spectra: SpectraConfig
) -> AngularSpectrumParams:
    """Radian spectra for one site; elevation means left unset follow the site's LoS angle."""
    return spectra.to_params(los_elevation_angle(placement))


def sample_elevation_laplacian(
    mean: float, spread: float, count: int, rng: np.random.Generator
) -> NDArray[np.float64]:
    """Laplace(mean, spread/sqrt(2)) samples, redrawn until all fall inside [0, pi]."""
    if spread <= 0.0:
        raise GeometryError(f"elevation spread must be positive, got {spread}")
    if not 0.0 <= mean <= math.pi:
        raise GeometryError(f"elevation mean {mean} outside [0, pi]")

    scale = spread / math.sqrt(2.0)
    samples = rng.laplace(mean, scale, size=count)
    outside = (samples < 0.0) | (samples > math.pi)
    while np.any(outside):
        samples[outside] = rng.laplace(mean, scale, size=int(outside.sum()))
        outside = (samples < 0.0) | (samples > math.pi)
    return samples


def sample_azimuth_von_mises(
    mean: float, concentration: float, count: int, rng: np.random.Generator
) -> NDArray[np.float64]:
    """Von Mises(mean, concentration) samples wrapped to (-pi, pi]."""
    if concentration < 0.0:
        raise GeometryError(f"concentration must be >= 0, got {concentration}")

    samples = rng.vonmises(mean, concentration, size=count)
    samples = np.mod(samples + math.pi, 2.0 * math.pi) - math.pi
    return np.where(samples <= -math.pi, samples + 2.0 * math.pi, samples)


def elevation_laplacian_cdf(
    x: NDArray[np.float64] | float, mean: float, spread: float
) -> NDArray[np.float64]:
    """CDF of the Laplacian elevation law truncated to [0, pi]."""
    law = stats.laplace(loc=mean, scale=spread / math.sqrt(2.0))
    low, high = law.cdf(0.0), law.cdf(math.pi)
    clipped = np.clip(x, 0.0, math.pi)
    return (law.cdf(clipped) - low) / (high - low)


def azimuth_von_mises_cdf(
    x: NDArray[np.float64] | float, mean: float, concentration: float
) -> NDArray[np.float64]:
    """CDF on (-pi, pi] of the wrapped Von Mises azimuth law."""
    law = stats.vonmises(concentration, loc=0.0)
    x = np.asarray(x, dtype=float)
    # Work relative to the mean, then re-anchor so the CDF starts at -pi.
    relative = np.mod(x - mean + math.pi, 2.0 * math.pi) - math.pi
    start = np.mod(-math.pi - mean + math.pi, 2.0 * math.pi) - math.pi
    mass = law.cdf(relative) - law.cdf(start)
    # x = pi lands back on the start point and must read as the full circle.
    return np.where(mass <= 0.0, mass + 1.0, mass)


@lru_cache(maxsize=PATH_ANGLE_CACHE_SIZE)
def _cached_path_angles(
    params: AngularSpectrumParams,
    n_paths: int,
    entropy: int,
    spawn_key: tuple[int, ...],
) -> PathAngles:
    seed = np.random.SeedSequence(entropy=entropy, spawn_key=spawn_key)

    def marginal_rng(marginal: AngleMarginal) -> np.random.Generator:
        return np.random.default_rng(child_seed_sequence(seed, marginal))

    angles = PathAngles(
        depart_azimuth=sample_azimuth_von_mises(
            params.azimuth_mean,
            params.azimuth_concentration,
            n_paths,
            marginal_rng(AngleMarginal.DEPART_AZIMUTH),
        ),
        depart_elevation=sample_elevation_laplacian(
            params.elevation_mean_depart,
            params.elevation_spread_depart,
            n_paths,
            marginal_rng(AngleMarginal.DEPART_ELEVATION),
        ),
        arrive_azimuth=sample_azimuth_von_mises(
            params.azimuth_mean,
            params.azimuth_concentration,
            n_paths,
            marginal_rng(AngleMarginal.ARRIVE_AZIMUTH),
        ),
        arrive_elevation=sample_elevation_laplacian(
            params.elevation_mean_arrive,
            params.elevation_spread_arrive,
            n_paths,
            marginal_rng(AngleMarginal.ARRIVE_ELEVATION),
        ),
    )
    logger.debug(
        f"Generated {n_paths} path angles; depart elevation range "
        f"[{np.degrees(angles.depart_elevation.min()):.2f}, "
        f"{np.degrees(angles.depart_elevation.max()):.2f}] deg"
    )
    return angles


def generate_path_angles(
    params: AngularSpectrumParams, n_paths: int, seed: np.random.SeedSequence
) -> PathAngles:
    """Draw one PathAngles from the four spectra.

    Results are memoized on (params, n_paths, seed), so every realization of a scenario shares
    the same immutable angles.

    Args:
        params (AngularSpectrumParams): Spectra, radians.
        n_paths (int): N >= 1.
        seed (np.random.SeedSequence): Scenario angle stream; the four marginals use fixed child
            labels of it.

    Returns:
        PathAngles: Read-only angle arrays of length n_paths.
    """
    if n_paths < 1:
        raise GeometryError(f"n_paths must be >= 1, got {n_paths}")
    if not isinstance(seed.entropy, int):
        raise GeometryError("path angle streams need an integer entropy")
    return _cached_path_angles(params, n_paths, seed.entropy, tuple(seed.spawn_key))
