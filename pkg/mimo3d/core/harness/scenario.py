# mimo3d/core/harness/scenario.py
"""Multi-cell scenario assembly.

The first configured site is the serving BS; the others are co-channel interferers unless the
config turns interference off. Every site gets its own path angles (own angle substream, elevation
means at its own LoS angle unless pinned) and its own tilts. R is the sum of the interferers'
expected Gram matrices. sigma^2 follows from snr_db and, under the rx_port reference, from the
serving power per MS port with the serving BS tilted at the MS.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from mimo3d.core.antenna_array import SteeringMatrices, build_steering_matrices
from mimo3d.core.channel import NoiseInterference, interference_matrix, mean_port_power
from mimo3d.core.geometry import (
    PathAngles,
    angular_spectrum_for_site,
    generate_path_angles,
    los_elevation_angle,
)
from mimo3d.models import ScenarioConfig, SiteConfig, SitePlacement, TiltConfig
from mimo3d.utils.rng_streams import StreamPurpose, derive_seed_sequence

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SiteLink:
    name: str
    placement: SitePlacement
    los_elevation: float
    angles: PathAngles
    tilts: TiltConfig
    steering: SteeringMatrices


@dataclass(frozen=True)
class MultiCellScenario:
    config: ScenarioConfig
    serving: SiteLink
    interferers: tuple[SiteLink, ...]
    noise_interference: NoiseInterference

    @property
    def serving_steering(self) -> SteeringMatrices:
        return self.serving.steering


def _steering(config: ScenarioConfig, angles: PathAngles, tilts: TiltConfig) -> SteeringMatrices:
    return build_steering_matrices(
        angles,
        tilts,
        config.pattern.to_params(),
        config.array.to_geometry(),
        config.n_bs,
        config.n_ms,
        config.normalization,
    )


def _build_site_link(
    config: ScenarioConfig,
    site: SiteConfig,
    site_index: int,
    tilts: Optional[TiltConfig] = None,
) -> SiteLink:
    placement = site.to_placement()
    los = los_elevation_angle(placement)
    spectrum = angular_spectrum_for_site(placement, config.spectra)
    angles = generate_path_angles(
        spectrum,
        config.n_paths,
        derive_seed_sequence(config.master_seed, StreamPurpose.ANGLES, site_index),
    )
    if tilts is None:
        tilts = config.tilts_for_site(site, los)
    steering = _steering(config, angles, tilts)
    logger.debug(f"Site {site.name}: LoS elevation {np.degrees(los):.2f} deg")
    return SiteLink(
        name=site.name,
        placement=placement,
        los_elevation=los,
        angles=angles,
        tilts=tilts,
        steering=steering,
    )


def _reference_port_power(config: ScenarioConfig, serving: SiteLink) -> float:
    """Mean serving power per MS port with every serving port tilted at the MS.

    Independent of the configured serving tilt, so a tilt sweep keeps one sigma^2.
    """
    los_tilts = TiltConfig.uniform(serving.los_elevation, config.n_bs)
    if serving.tilts == los_tilts:
        return mean_port_power(serving.steering)
    return mean_port_power(_steering(config, serving.angles, los_tilts))


def scenario_multicell(config: ScenarioConfig) -> MultiCellScenario:
    """Build the serving link, the interferer links and the noise-plus-interference model.

    Args:
        config (ScenarioConfig): Validated scenario.

    Returns:
        MultiCellScenario: Serving steering plus NoiseInterference, with the per-site details.
    """
    serving_site = config.serving_site
    serving_los = los_elevation_angle(serving_site.to_placement())
    serving = _build_site_link(config, serving_site, 0, config.serving_tilts(serving_los))

    interferers = tuple(
        _build_site_link(config, site, index)
        for index, site in enumerate(config.sites)
        if index > 0 and config.co_channel_interference
    )
    r_matrix = interference_matrix([link.steering for link in interferers], n_ms=config.n_ms)
    reference_power = _reference_port_power(config, serving)
    noise_variance = config.noise_variance(reference_power)
    noise_interference = NoiseInterference.build(r_matrix, noise_variance)

    logger.info(
        f"Scenario built: N_BS={config.n_bs} N_MS={config.n_ms} N={config.n_paths} "
        f"SNR={config.snr_db} dB ({config.snr_reference}, sigma^2={noise_variance:.4g}), "
        f"{len(interferers)} interferer(s), "
        f"serving tilt {np.degrees(serving.tilts.per_port_tilt[0]):.2f} deg, "
        f"Tr(R)={np.real(np.trace(r_matrix)):.4g}"
    )
    return MultiCellScenario(
        config=config,
        serving=serving,
        interferers=interferers,
        noise_interference=noise_interference,
    )


def retilt_serving(scenario: MultiCellScenario, tilts: TiltConfig) -> SteeringMatrices:
    """Serving steering for new tilts; path angles and interference stay as they are."""
    return _steering(scenario.config, scenario.serving.angles, tilts)
