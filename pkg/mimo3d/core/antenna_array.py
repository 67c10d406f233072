# mimo3d/core/antenna_array.py
"""ITU port pattern, array responses, and the deterministic steering matrices A and B.

The channel is H = p * B diag(alpha) A^H, with p applied in the channel module. A and B are stored
raw: a_matrix[s, n] is the conjugated transmit phase of path n at port s times the port's field
amplitude toward that path, b_matrix[u, n] is the receive phase (0 dB receive gain). With this
storage, B diag(alpha) A^H reproduces the explicit path sum entry by entry.

Under ChannelNormalization.N the builder folds an extra 1/sqrt(N) into A, which turns the channel
module's 1/sqrt(N) into an overall 1/N. Kernels built from the same matrices stay consistent.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from mimo3d.core.geometry import PathAngles
from mimo3d.models import (
    AntennaPatternParams,
    ArrayGeometry,
    ChannelNormalization,
    TiltConfig,
)

logger = logging.getLogger(__name__)


class SteeringError(Exception):
    pass


class DimensionMismatchError(SteeringError):
    pass


@dataclass(frozen=True)
class SteeringMatrices:
    a_matrix: NDArray[np.complex128]  # N_BS x N
    b_matrix: NDArray[np.complex128]  # N_MS x N

    def __post_init__(self):
        if self.a_matrix.ndim != 2 or self.b_matrix.ndim != 2:
            raise DimensionMismatchError("steering matrices must be 2-D")
        if self.a_matrix.shape[1] != self.b_matrix.shape[1]:
            raise DimensionMismatchError(
                f"A has {self.a_matrix.shape[1]} paths but B has {self.b_matrix.shape[1]}"
            )
        self.a_matrix.setflags(write=False)
        self.b_matrix.setflags(write=False)

    @property
    def n_bs(self) -> int:
        return self.a_matrix.shape[0]

    @property
    def n_ms(self) -> int:
        return self.b_matrix.shape[0]

    @property
    def n_paths(self) -> int:
        return self.a_matrix.shape[1]


def horizontal_attenuation_db(
    azimuth: ArrayLike, params: AntennaPatternParams
) -> NDArray[np.float64]:
    ratio = np.asarray(azimuth, dtype=float) / params.horizontal_3db_beamwidth
    return -np.minimum(12.0 * ratio**2, params.attenuation_floor_db)


def vertical_attenuation_db(
    elevation: ArrayLike, tilt: ArrayLike, params: AntennaPatternParams
) -> NDArray[np.float64]:
    offset = np.asarray(elevation, dtype=float) - np.asarray(tilt, dtype=float)
    ratio = offset / params.vertical_3db_beamwidth
    return -np.minimum(12.0 * ratio**2, params.attenuation_floor_db)


def port_field_amplitude(
    azimuth: ArrayLike,
    elevation: ArrayLike,
    tilt: ArrayLike,
    params: AntennaPatternParams,
) -> NDArray[np.float64]:
    """Linear field amplitude sqrt(g_t) of one port toward (azimuth, elevation).

    The horizontal and vertical attenuations add in dB and are clipped jointly at the floor.
    """
    total_attenuation = -(
        horizontal_attenuation_db(azimuth, params)
        + vertical_attenuation_db(elevation, tilt, params)
    )
    gain_db = params.max_gain_db - np.minimum(total_attenuation, params.attenuation_floor_db)
    return 10.0 ** (gain_db / 20.0)


def _steering_phase(
    port_index: ArrayLike,
    azimuth: ArrayLike,
    elevation: ArrayLike,
    spacing: float,
    wavenumber: float,
) -> NDArray[np.complex128]:
    offset = np.asarray(port_index, dtype=float) - 1.0
    return np.exp(
        1j * wavenumber * offset * spacing * np.sin(azimuth) * np.sin(elevation)
    )


def tx_steering_entry(
    port_index: ArrayLike, azimuth: ArrayLike, elevation: ArrayLike, geometry: ArrayGeometry
) -> NDArray[np.complex128]:
    """exp(i k (s-1) d_t sin(phi) sin(theta)) for 1-based port s."""
    return _steering_phase(
        port_index, azimuth, elevation, geometry.tx_spacing, geometry.wavenumber
    )


def rx_steering_entry(
    port_index: ArrayLike, azimuth: ArrayLike, elevation: ArrayLike, geometry: ArrayGeometry
) -> NDArray[np.complex128]:
    """exp(i k (u-1) d_r sin(phi) sin(theta)) for 1-based port u."""
    return _steering_phase(
        port_index, azimuth, elevation, geometry.rx_spacing, geometry.wavenumber
    )


def build_steering_matrices(
    angles: PathAngles,
    tilts: TiltConfig,
    pattern: AntennaPatternParams,
    geometry: ArrayGeometry,
    n_bs: int,
    n_ms: int,
    normalization: ChannelNormalization = ChannelNormalization.SQRT_N,
) -> SteeringMatrices:
    """Assemble A (N_BS x N) and B (N_MS x N) for one BS-MS link.

    Args:
        angles (PathAngles): Fixed path angles of the link.
        tilts (TiltConfig): One tilt per BS port.
        pattern (AntennaPatternParams): Port pattern.
        geometry (ArrayGeometry): Port spacings and wavenumber.
        n_bs (int): BS ports.
        n_ms (int): MS ports.
        normalization (ChannelNormalization): SQRT_N keeps A raw; N scales it by 1/sqrt(N).

    Returns:
        SteeringMatrices: Read-only A and B.

    Raises:
        DimensionMismatchError: If tilts doesn't have n_bs entries or a dimension is < 1.
    """
    if n_bs < 1 or n_ms < 1:
        raise DimensionMismatchError(f"port counts must be >= 1, got {n_bs=} {n_ms=}")
    if tilts.n_bs != n_bs:
        raise DimensionMismatchError(f"{tilts.n_bs} tilts given for {n_bs} BS ports")

    tx_ports = np.arange(1, n_bs + 1)[:, None]
    rx_ports = np.arange(1, n_ms + 1)[:, None]
    port_tilts = np.asarray(tilts.per_port_tilt)[:, None]

    tx_phase = tx_steering_entry(
        tx_ports, angles.depart_azimuth[None, :], angles.depart_elevation[None, :], geometry
    )
    amplitude = port_field_amplitude(
        angles.depart_azimuth[None, :],
        angles.depart_elevation[None, :],
        port_tilts,
        pattern,
    )
    a_matrix = np.conj(tx_phase) * amplitude
    if normalization == ChannelNormalization.N:
        a_matrix = a_matrix / np.sqrt(angles.n_paths)

    b_matrix = rx_steering_entry(
        rx_ports, angles.arrive_azimuth[None, :], angles.arrive_elevation[None, :], geometry
    )

    logger.debug(
        f"Steering built: {n_bs=} {n_ms=} N={angles.n_paths}; "
        f"|A| in [{np.abs(a_matrix).min():.4g}, {np.abs(a_matrix).max():.4g}]"
    )
    return SteeringMatrices(
        a_matrix=np.ascontiguousarray(a_matrix, dtype=np.complex128),
        b_matrix=np.ascontiguousarray(b_matrix, dtype=np.complex128),
    )
