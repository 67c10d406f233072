# mimo3d/core/channel.py
"""Maximum-entropy channel realizations, mutual information, and interference covariance.

H = (1/sqrt(N)) B diag(alpha) A^H with alpha ~ CN(0, I_N). MI is in nats:

    I = log det(I + Omega H H^H),   Omega = (R + sigma^2 I)^-1

evaluated through the Cholesky factor L of R + sigma^2 I, as log det(I + G G^H) with G = L^-1 H.
The interference covariance R sums the closed-form expectations E[H_i H_i^H] of the interferers.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import linalg

from mimo3d.core.antenna_array import (
    SteeringMatrices,
    port_field_amplitude,
    rx_steering_entry,
    tx_steering_entry,
)
from mimo3d.core.geometry import PathAngles
from mimo3d.models import (
    AntennaPatternParams,
    ArrayGeometry,
    ChannelNormalization,
    TiltConfig,
)
from mimo3d.utils.rng_streams import StreamPurpose, derive_generator

logger = logging.getLogger(__name__)

# Relative tolerance on Hermitian symmetry and on negative eigenvalues of R.
COVARIANCE_TOLERANCE = 1e-10


class ChannelError(Exception):
    pass


class ChannelDimensionError(ChannelError):
    pass


class InterferenceCovarianceError(ChannelError):
    """R isn't Hermitian PSD, or sigma^2 isn't positive."""


@dataclass(frozen=True)
class GainVector:
    alpha: NDArray[np.complex128]

    @property
    def n_paths(self) -> int:
        return len(self.alpha)


@dataclass(frozen=True)
class ChannelRealization:
    h_matrix: NDArray[np.complex128]  # N_MS x N_BS


@dataclass(frozen=True)
class NoiseInterference:
    """R, sigma^2 and the derived whitening Omega = (R + sigma^2 I)^-1.

    Build with NoiseInterference.build(), which validates R and factors R + sigma^2 I once.
    """

    interference_cov: NDArray[np.complex128]
    noise_variance: float
    whitening: NDArray[np.complex128]
    condition_number: float
    cholesky_lower: NDArray[np.complex128] = field(repr=False)

    @property
    def zeta(self) -> NDArray[np.complex128]:
        """R + sigma^2 I, whose entries are the zeta_ij offsets of the mean matrices."""
        n_ms = self.interference_cov.shape[0]
        return self.interference_cov + self.noise_variance * np.eye(n_ms)

    @property
    def n_ms(self) -> int:
        return self.interference_cov.shape[0]

    @property
    def log_det_zeta(self) -> float:
        return float(2.0 * np.sum(np.log(np.real(np.diag(self.cholesky_lower)))))

    @classmethod
    def build(
        cls, interference_cov: NDArray[np.complex128], noise_variance: float
    ) -> "NoiseInterference":
        """Validate R and sigma^2 and precompute the whitening.

        Raises:
            InterferenceCovarianceError: Non-square, non-Hermitian or indefinite R, or
                sigma^2 <= 0.
        """
        r_matrix = np.asarray(interference_cov, dtype=np.complex128)
        if r_matrix.ndim != 2 or r_matrix.shape[0] != r_matrix.shape[1]:
            raise InterferenceCovarianceError(f"R must be square, got {r_matrix.shape}")
        if not noise_variance > 0.0 or not np.isfinite(noise_variance):
            raise InterferenceCovarianceError(f"noise variance must be > 0, got {noise_variance}")

        scale = max(1.0, float(np.max(np.abs(r_matrix), initial=0.0)))
        tolerance = COVARIANCE_TOLERANCE * scale
        if not np.allclose(r_matrix, r_matrix.conj().T, rtol=0.0, atol=tolerance):
            raise InterferenceCovarianceError("R is not Hermitian")
        r_matrix = 0.5 * (r_matrix + r_matrix.conj().T)
        if r_matrix.size and np.linalg.eigvalsh(r_matrix).min() < -tolerance:
            raise InterferenceCovarianceError("R is not positive semidefinite")

        n_ms = r_matrix.shape[0]
        zeta = r_matrix + noise_variance * np.eye(n_ms)
        cholesky_lower = linalg.cholesky(zeta, lower=True)
        whitening = linalg.cho_solve((cholesky_lower, True), np.eye(n_ms, dtype=np.complex128))
        whitening = 0.5 * (whitening + whitening.conj().T)
        condition_number = float(np.linalg.cond(zeta))
        logger.debug(
            f"Noise-plus-interference built: {n_ms=} sigma^2={noise_variance:.4g} "
            f"cond={condition_number:.3g}"
        )
        return cls(
            interference_cov=r_matrix,
            noise_variance=float(noise_variance),
            whitening=whitening,
            condition_number=condition_number,
            cholesky_lower=cholesky_lower,
        )


def sample_gains(n_paths: int, rng: np.random.Generator) -> GainVector:
    """Circularly symmetric CN(0, 1) gains; real and imaginary parts each have variance 1/2."""
    alpha = (rng.standard_normal(n_paths) + 1j * rng.standard_normal(n_paths)) / np.sqrt(2.0)
    return GainVector(alpha=alpha)


def realize_channel(steering: SteeringMatrices, alpha: GainVector) -> ChannelRealization:
    if alpha.n_paths != steering.n_paths:
        raise ChannelDimensionError(
            f"{alpha.n_paths} gains for {steering.n_paths} paths"
        )
    scaled_b = steering.b_matrix * alpha.alpha[None, :]
    h_matrix = (scaled_b @ steering.a_matrix.conj().T) / np.sqrt(steering.n_paths)
    return ChannelRealization(h_matrix=h_matrix)


def path_sum_channel(
    angles: PathAngles,
    tilts: TiltConfig,
    pattern: AntennaPatternParams,
    geometry: ArrayGeometry,
    alpha: GainVector,
    n_bs: int,
    n_ms: int,
    normalization: ChannelNormalization = ChannelNormalization.SQRT_N,
) -> ChannelRealization:
    """Channel from the explicit per-entry sum over paths, one term at a time.

    Slow; exists to cross-check realize_channel and the steering builder.
    """
    prefactor = 1.0 / np.sqrt(angles.n_paths)
    if normalization == ChannelNormalization.N:
        prefactor = 1.0 / angles.n_paths

    h_matrix = np.zeros((n_ms, n_bs), dtype=np.complex128)
    for u in range(1, n_ms + 1):
        for s in range(1, n_bs + 1):
            total = 0.0 + 0.0j
            for n in range(angles.n_paths):
                gain = port_field_amplitude(
                    angles.depart_azimuth[n],
                    angles.depart_elevation[n],
                    tilts.per_port_tilt[s - 1],
                    pattern,
                )
                tx_phase = tx_steering_entry(
                    s, angles.depart_azimuth[n], angles.depart_elevation[n], geometry
                )
                rx_phase = rx_steering_entry(
                    u, angles.arrive_azimuth[n], angles.arrive_elevation[n], geometry
                )
                total += alpha.alpha[n] * gain * tx_phase * rx_phase
            h_matrix[u - 1, s - 1] = prefactor * total
    return ChannelRealization(h_matrix=h_matrix)


def _check_ms_dimension(h: ChannelRealization, ni: NoiseInterference) -> None:
    if h.h_matrix.shape[0] != ni.n_ms:
        raise ChannelDimensionError(
            f"channel has {h.h_matrix.shape[0]} MS ports, noise model has {ni.n_ms}"
        )


def _whitened(h: ChannelRealization, ni: NoiseInterference) -> NDArray[np.complex128]:
    return linalg.solve_triangular(ni.cholesky_lower, h.h_matrix, lower=True)


def mutual_information(h: ChannelRealization, ni: NoiseInterference) -> float:
    """log det(I + Omega H H^H) in nats."""
    _check_ms_dimension(h, ni)
    whitened = _whitened(h, ni)
    eigenvalues = np.linalg.eigvalsh(whitened @ whitened.conj().T)
    return float(np.sum(np.log1p(np.maximum(eigenvalues, 0.0))))


def low_snr_mi(h: ChannelRealization, ni: NoiseInterference) -> float:
    """Tr(Omega H H^H), the first-order expansion of the MI."""
    _check_ms_dimension(h, ni)
    whitened = _whitened(h, ni)
    return float(np.real(np.vdot(whitened, whitened)))


def expected_gram(steering: SteeringMatrices) -> NDArray[np.complex128]:
    """E[H H^H] = (1/N) B diag(d) B^H with d_n = [A^H A]_nn."""
    column_power = np.sum(np.abs(steering.a_matrix) ** 2, axis=0)
    gram = (steering.b_matrix * column_power[None, :]) @ steering.b_matrix.conj().T
    gram = gram / steering.n_paths
    return 0.5 * (gram + gram.conj().T)


def mean_port_power(steering: SteeringMatrices) -> float:
    """Tr E[H H^H] / N_MS, the average received power per MS port."""
    return float(np.real(np.trace(expected_gram(steering)))) / steering.n_ms


def interference_matrix(
    interferer_steerings: Sequence[SteeringMatrices], n_ms: Optional[int] = None
) -> NDArray[np.complex128]:
    """R as the sum of the interferers' expected Gram matrices.

    Args:
        interferer_steerings: One SteeringMatrices per co-channel interferer.
        n_ms (int | None): MS port count; required when there are no interferers.

    Returns:
        NDArray: Hermitian PSD N_MS x N_MS matrix; zero without interferers.

    Raises:
        ChannelDimensionError: Interferers disagree on N_MS, or an empty list without n_ms.
    """
    if not interferer_steerings:
        if n_ms is None:
            raise ChannelDimensionError("n_ms is required when there are no interferers")
        return np.zeros((n_ms, n_ms), dtype=np.complex128)

    dims = {steering.n_ms for steering in interferer_steerings}
    if n_ms is not None:
        dims.add(n_ms)
    if len(dims) != 1:
        raise ChannelDimensionError(f"interferers disagree on N_MS: {sorted(dims)}")

    total = np.zeros((dims.pop(),) * 2, dtype=np.complex128)
    for steering in interferer_steerings:
        total += expected_gram(steering)
    return total


def sample_interference_covariance(
    interferer_steerings: Sequence[SteeringMatrices], draws: int, master_seed: int
) -> NDArray[np.complex128]:
    """Monte Carlo estimate of R, each interferer drawing from its own gain substream."""
    if not interferer_steerings:
        raise ChannelDimensionError("need at least one interferer to sample")
    n_ms = interferer_steerings[0].n_ms
    total = np.zeros((n_ms, n_ms), dtype=np.complex128)
    for index, steering in enumerate(interferer_steerings):
        rng = derive_generator(master_seed, StreamPurpose.INTERFERER_GAINS, index)
        for _ in range(draws):
            h = realize_channel(steering, sample_gains(steering.n_paths, rng)).h_matrix
            total += h @ h.conj().T
    return total / draws
