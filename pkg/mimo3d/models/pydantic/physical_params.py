# mimo3d/models/pydantic/physical_params.py
"""Physical parameter types shared by the core modules.

All angles here are radians and all lengths meters. Degrees only appear at the YAML boundary (see
scenario_config.py), which converts into these models.

Classes:
    ChannelNormalization: overall path-sum prefactor convention.
    SnrReference: what power snr_db is measured against.
    SitePlacement: BS/MS positions and heights for one BS-MS link.
    AngularSpectrumParams: Laplacian elevation and Von Mises azimuth spectra.
    AntennaPatternParams: ITU port pattern beamwidths, peak gain and attenuation floor.
    ArrayGeometry: port spacings and carrier wavenumber.
    TiltConfig: per-port boresight elevation (downtilt) angles.
"""
import math
from mimo3d._compat import StrEnum
from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from mimo3d.models._validator_ranges import (
    MAX_ELEVATION_RAD,
    SPEED_OF_LIGHT_M_PER_S,
    in_closed_range,
    in_open_range,
)


class ChannelNormalization(StrEnum):
    SQRT_N = "sqrt_n"  # single overall 1/sqrt(N); E||H||_F^2 independent of N
    N = "n"  # literal 1/N path-sum prefactor


class SnrReference(StrEnum):
    RX_PORT = "rx_port"  # mean serving power per MS port, serving BS tilted at the MS
    ABSOLUTE = "absolute"  # snr_db is 1/sigma^2 as is


class SitePlacement(BaseModel):
    """One BS-MS link of the layout.

    Args:
        bs_position (tuple[float, float]): BS ground coordinates in meters.
        bs_height (float): BS antenna height in meters.
        ms_position (tuple[float, float]): MS ground coordinates in meters.
        ms_height (float): MS antenna height in meters.
    """

    model_config = ConfigDict(frozen=True)

    bs_position: tuple[float, float]
    bs_height: Annotated[float, Field(gt=0.0)]
    ms_position: tuple[float, float]
    ms_height: Annotated[float, Field(gt=0.0)]

    @property
    def horizontal_distance(self) -> float:
        return math.hypot(
            self.ms_position[0] - self.bs_position[0],
            self.ms_position[1] - self.bs_position[1],
        )

    @property
    def height_difference(self) -> float:
        """MS height minus BS height (negative when the BS is higher)."""
        return self.ms_height - self.bs_height

    @model_validator(mode="after")
    def check_layout(self) -> "SitePlacement":
        if not self.bs_height > self.ms_height:
            raise ValueError(
                f"BS height {self.bs_height} must exceed MS height {self.ms_height}"
            )
        if self.horizontal_distance <= 0.0:
            raise ValueError("MS can't sit directly under the BS")
        return self


class AngularSpectrumParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    elevation_mean_depart: float
    elevation_spread_depart: Annotated[float, Field(gt=0.0)]
    elevation_mean_arrive: float
    elevation_spread_arrive: Annotated[float, Field(gt=0.0)]
    azimuth_mean: float = 0.0
    azimuth_concentration: Annotated[float, Field(ge=0.0)] = 5.0

    @field_validator("elevation_mean_depart", "elevation_mean_arrive")
    @classmethod
    def check_elevation(cls, value: float) -> float:
        return in_closed_range(value, 0.0, MAX_ELEVATION_RAD)

    @field_validator("azimuth_mean")
    @classmethod
    def check_azimuth(cls, value: float) -> float:
        return in_closed_range(value, -math.pi, math.pi)


class AntennaPatternParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    vertical_3db_beamwidth: Annotated[float, Field(gt=0.0)]
    horizontal_3db_beamwidth: Annotated[float, Field(gt=0.0)]
    max_gain_db: float = 17.0
    attenuation_floor_db: Annotated[float, Field(gt=0.0)] = 20.0

    @property
    def peak_field_amplitude(self) -> float:
        return 10.0 ** (self.max_gain_db / 20.0)


class ArrayGeometry(BaseModel):
    model_config = ConfigDict(frozen=True)

    tx_spacing: Annotated[float, Field(gt=0.0)]
    rx_spacing: Annotated[float, Field(gt=0.0)]
    wavenumber: Annotated[float, Field(gt=0.0)]

    @classmethod
    def from_carrier(
        cls,
        carrier_frequency_hz: float,
        tx_spacing_wavelengths: float = 0.5,
        rx_spacing_wavelengths: float = 0.5,
    ) -> "ArrayGeometry":
        """Build a geometry from a carrier frequency and spacings given in wavelengths."""
        wavelength = SPEED_OF_LIGHT_M_PER_S / carrier_frequency_hz
        return cls(
            tx_spacing=tx_spacing_wavelengths * wavelength,
            rx_spacing=rx_spacing_wavelengths * wavelength,
            wavenumber=2.0 * math.pi / wavelength,
        )


class TiltConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    per_port_tilt: Annotated[tuple[float, ...], Field(min_length=1)]

    @field_validator("per_port_tilt")
    @classmethod
    def check_tilts(cls, value: tuple[float, ...]) -> tuple[float, ...]:
        return tuple(in_open_range(tilt, 0.0, MAX_ELEVATION_RAD) for tilt in value)

    @property
    def n_bs(self) -> int:
        return len(self.per_port_tilt)

    @classmethod
    def uniform(cls, tilt: float, n_bs: int) -> "TiltConfig":
        return cls(per_port_tilt=(float(tilt),) * n_bs)
