# mimo3d/models/pydantic/scenario_config.py
"""ScenarioConfig and its sections.

This is the YAML-facing schema: angles in degrees, power in dB. Every field defaults to the
reference two-cell, cell-edge setup, so an empty file is a valid scenario. The conversion methods
(to_params, to_geometry, tilts_for_site, ...) hand the core modules radian/linear models from
physical_params.py.

Classes:
    SiteConfig: one BS with its link to the (single) MS, plus an optional tilt override.
    PatternConfig, ArrayConfig, SpectraConfig: nested sections.
    ScenarioConfig: the single source of truth for a run.
"""
import math
from typing import Annotated, Any, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from mimo3d.models._validator_ranges import (
    DEFAULT_ATTENUATION_FLOOR_DB,
    DEFAULT_AZIMUTH_CONCENTRATION,
    DEFAULT_AZIMUTH_MEAN_DEG,
    DEFAULT_BS_HEIGHT_M,
    DEFAULT_CARRIER_FREQUENCY_HZ,
    DEFAULT_ELEVATION_SPREAD_ARRIVE_DEG,
    DEFAULT_ELEVATION_SPREAD_DEPART_DEG,
    DEFAULT_HORIZONTAL_3DB_DEG,
    DEFAULT_INTER_SITE_DISTANCE_M,
    DEFAULT_MASTER_SEED,
    DEFAULT_MAX_GAIN_DB,
    DEFAULT_MS_HEIGHT_M,
    DEFAULT_N_BS,
    DEFAULT_N_MS,
    DEFAULT_N_PATHS,
    DEFAULT_SNR_DB,
    DEFAULT_SPACING_WAVELENGTHS,
    DEFAULT_TRIALS,
    DEFAULT_VERTICAL_3DB_DEG,
    MAX_ELEVATION_DEG,
    MAX_SEED,
    in_closed_range,
    in_open_range,
)
from mimo3d.models.pydantic.physical_params import (
    AngularSpectrumParams,
    AntennaPatternParams,
    ArrayGeometry,
    ChannelNormalization,
    SitePlacement,
    SnrReference,
    TiltConfig,
)


class SiteConfig(BaseModel):
    """A BS and its link to the MS.

    Args:
        name (str): Label used in logs.
        bs_position (tuple[float, float]): BS ground coordinates, meters.
        bs_height (float): meters.
        ms_position (tuple[float, float]): MS ground coordinates, meters. Shared by all sites.
        ms_height (float): meters. Shared by all sites.
        tilt_deg (float | None): Common tilt of this BS's ports. None means the site's LoS angle
            toward the MS. Ignored for the serving site when ScenarioConfig.tilt_deg is set.
    """

    model_config = ConfigDict(extra="forbid")

    name: str = "site"
    bs_position: tuple[float, float] = (0.0, 0.0)
    bs_height: Annotated[float, Field(gt=0.0)] = DEFAULT_BS_HEIGHT_M
    ms_position: tuple[float, float] = (DEFAULT_INTER_SITE_DISTANCE_M / 2.0, 0.0)
    ms_height: Annotated[float, Field(gt=0.0)] = DEFAULT_MS_HEIGHT_M
    tilt_deg: Optional[float] = None

    @field_validator("tilt_deg")
    @classmethod
    def check_tilt(cls, value: Optional[float]) -> Optional[float]:
        if value is None:
            return value
        return in_open_range(value, 0.0, MAX_ELEVATION_DEG)

    def to_placement(self) -> SitePlacement:
        return SitePlacement(
            bs_position=self.bs_position,
            bs_height=self.bs_height,
            ms_position=self.ms_position,
            ms_height=self.ms_height,
        )


def _default_sites() -> list[SiteConfig]:
    return [
        SiteConfig(name="serving", bs_position=(0.0, 0.0)),
        SiteConfig(name="interferer", bs_position=(DEFAULT_INTER_SITE_DISTANCE_M, 0.0)),
    ]


class PatternConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    vertical_3db_beamwidth_deg: Annotated[float, Field(gt=0.0)] = DEFAULT_VERTICAL_3DB_DEG
    horizontal_3db_beamwidth_deg: Annotated[float, Field(gt=0.0)] = DEFAULT_HORIZONTAL_3DB_DEG
    max_gain_db: float = DEFAULT_MAX_GAIN_DB
    attenuation_floor_db: Annotated[float, Field(gt=0.0)] = DEFAULT_ATTENUATION_FLOOR_DB

    def to_params(self) -> AntennaPatternParams:
        return AntennaPatternParams(
            vertical_3db_beamwidth=math.radians(self.vertical_3db_beamwidth_deg),
            horizontal_3db_beamwidth=math.radians(self.horizontal_3db_beamwidth_deg),
            max_gain_db=self.max_gain_db,
            attenuation_floor_db=self.attenuation_floor_db,
        )


class ArrayConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    carrier_frequency_hz: Annotated[float, Field(gt=0.0)] = DEFAULT_CARRIER_FREQUENCY_HZ
    tx_spacing_wavelengths: Annotated[float, Field(gt=0.0)] = DEFAULT_SPACING_WAVELENGTHS
    rx_spacing_wavelengths: Annotated[float, Field(gt=0.0)] = DEFAULT_SPACING_WAVELENGTHS

    def to_geometry(self) -> ArrayGeometry:
        return ArrayGeometry.from_carrier(
            self.carrier_frequency_hz,
            self.tx_spacing_wavelengths,
            self.rx_spacing_wavelengths,
        )


class SpectraConfig(BaseModel):
    """Angular spectra; unset elevation means follow each site's LoS angle."""

    model_config = ConfigDict(extra="forbid")

    elevation_mean_depart_deg: Optional[float] = None
    elevation_mean_arrive_deg: Optional[float] = None
    elevation_spread_depart_deg: Annotated[float, Field(gt=0.0)] = (
        DEFAULT_ELEVATION_SPREAD_DEPART_DEG
    )
    elevation_spread_arrive_deg: Annotated[float, Field(gt=0.0)] = (
        DEFAULT_ELEVATION_SPREAD_ARRIVE_DEG
    )
    azimuth_mean_deg: float = DEFAULT_AZIMUTH_MEAN_DEG
    azimuth_concentration: Annotated[float, Field(ge=0.0)] = DEFAULT_AZIMUTH_CONCENTRATION

    @field_validator("elevation_mean_depart_deg", "elevation_mean_arrive_deg")
    @classmethod
    def check_elevation(cls, value: Optional[float]) -> Optional[float]:
        if value is None:
            return value
        return in_closed_range(value, 0.0, MAX_ELEVATION_DEG)

    @field_validator("azimuth_mean_deg")
    @classmethod
    def check_azimuth(cls, value: float) -> float:
        return in_closed_range(value, -180.0, 180.0)

    def to_params(self, los_elevation: float) -> AngularSpectrumParams:
        """Radian spectrum parameters, with unset elevation means taken from los_elevation."""
        depart = (
            los_elevation
            if self.elevation_mean_depart_deg is None
            else math.radians(self.elevation_mean_depart_deg)
        )
        arrive = (
            los_elevation
            if self.elevation_mean_arrive_deg is None
            else math.radians(self.elevation_mean_arrive_deg)
        )
        return AngularSpectrumParams(
            elevation_mean_depart=depart,
            elevation_spread_depart=math.radians(self.elevation_spread_depart_deg),
            elevation_mean_arrive=arrive,
            elevation_spread_arrive=math.radians(self.elevation_spread_arrive_deg),
            azimuth_mean=math.radians(self.azimuth_mean_deg),
            azimuth_concentration=self.azimuth_concentration,
        )


class ScenarioConfig(BaseModel):
    """Everything a run needs. Degrees and dB here; radians and linear units downstream.

    Args:
        n_bs (int): BS ports (N_BS).
        n_ms (int): MS ports (N_MS).
        n_paths (int): Propagation paths (N).
        snr_db (float): SNR in dB, measured against snr_reference.
        snr_reference (SnrReference): rx_port puts snr_db relative to the mean serving power per
            MS port (serving BS tilted at the MS); absolute makes it 1/sigma^2.
        tilt_deg (float | list[float] | None): Serving-BS tilt, common or per port. None means the
            serving LoS angle.
        trials (int): Monte Carlo channel realizations.
        master_seed (int): Root of every random substream.
        normalization (ChannelNormalization): Path-sum prefactor convention.
        co_channel_interference (bool): False treats every non-serving site as being on another
            band, so the MS sees noise only.
        sites (list[SiteConfig]): First entry is the serving BS.
    """

    model_config = ConfigDict(extra="forbid")

    n_bs: Annotated[int, Field(gt=0)] = DEFAULT_N_BS
    n_ms: Annotated[int, Field(gt=0)] = DEFAULT_N_MS
    n_paths: Annotated[int, Field(gt=0)] = DEFAULT_N_PATHS
    snr_db: Annotated[float, Field(allow_inf_nan=False)] = DEFAULT_SNR_DB
    snr_reference: SnrReference = SnrReference.RX_PORT
    tilt_deg: Optional[Union[float, list[float]]] = None
    trials: Annotated[int, Field(gt=0)] = DEFAULT_TRIALS
    master_seed: Annotated[int, Field(ge=0, le=MAX_SEED)] = DEFAULT_MASTER_SEED
    normalization: ChannelNormalization = ChannelNormalization.SQRT_N
    co_channel_interference: bool = True
    sites: list[SiteConfig] = Field(default_factory=_default_sites)
    pattern: PatternConfig = Field(default_factory=PatternConfig)
    array: ArrayConfig = Field(default_factory=ArrayConfig)
    spectra: SpectraConfig = Field(default_factory=SpectraConfig)

    @field_validator("tilt_deg")
    @classmethod
    def check_tilt(
        cls, value: Optional[Union[float, list[float]]]
    ) -> Optional[Union[float, list[float]]]:
        if value is None:
            return value
        if isinstance(value, list):
            return [in_open_range(tilt, 0.0, MAX_ELEVATION_DEG) for tilt in value]
        return in_open_range(value, 0.0, MAX_ELEVATION_DEG)

    @model_validator(mode="after")
    def check_consistency(self) -> "ScenarioConfig":
        if not self.sites:
            raise ValueError("at least the serving site is required")
        serving = self.sites[0]
        for site in self.sites[1:]:
            if site.ms_position != serving.ms_position or site.ms_height != serving.ms_height:
                raise ValueError(f"site {site.name} disagrees on the MS location")
        if isinstance(self.tilt_deg, list) and len(self.tilt_deg) != self.n_bs:
            raise ValueError(f"tilt_deg has {len(self.tilt_deg)} entries for {self.n_bs} ports")
        for site in self.sites:
            site.to_placement()
        return self

    def noise_variance(self, reference_power: float = 1.0) -> float:
        """sigma^2 for snr_db; reference_power is the mean serving power per MS port."""
        if self.snr_reference == SnrReference.ABSOLUTE:
            reference_power = 1.0
        elif not reference_power > 0.0:
            raise ValueError(f"reference power must be positive, got {reference_power}")
        return reference_power * 10.0 ** (-self.snr_db / 10.0)

    @property
    def serving_site(self) -> SiteConfig:
        return self.sites[0]

    def serving_tilts(self, los_elevation: float) -> TiltConfig:
        """Serving-BS tilts: explicit scenario tilt, else site override, else LoS."""
        if isinstance(self.tilt_deg, list):
            return TiltConfig(per_port_tilt=tuple(math.radians(t) for t in self.tilt_deg))
        if self.tilt_deg is not None:
            return TiltConfig.uniform(math.radians(self.tilt_deg), self.n_bs)
        return self.tilts_for_site(self.serving_site, los_elevation)

    def tilts_for_site(self, site: SiteConfig, los_elevation: float) -> TiltConfig:
        tilt = los_elevation if site.tilt_deg is None else math.radians(site.tilt_deg)
        return TiltConfig.uniform(tilt, self.n_bs)

    def with_overrides(self, **updates: Any) -> "ScenarioConfig":
        """Validated copy with top-level fields replaced; None values are ignored."""
        data = self.model_dump()
        data.update({key: value for key, value in updates.items() if value is not None})
        return ScenarioConfig.model_validate(data)
