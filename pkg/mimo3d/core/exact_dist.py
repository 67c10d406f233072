# mimo3d/core/exact_dist.py
"""Exact (single receive port) and low-SINR MI distributions.

For alpha ~ CN(0, I_N) the whitened Gram trace is the Hermitian quadratic form alpha^H C alpha with

    C = (1/N) (B^H Omega B) o (A^H A)^T

so it is distributed as sum_i lambda_i E_i, E_i ~ Exp(1), over the eigenvalues of C. With distinct
eigenvalues this is the hypoexponential law

    F(x) = 1 - sum_i w_i exp(-x / lambda_i),   w_i = prod_{l != i} lambda_i / (lambda_i - lambda_l).

With one receive port the MI is log(1 + X), so its CDF is F(e^y - 1). With several ports the same
law describes the low-SINR trace approximation of the MI.

Three evaluation paths are used by HypoexponentialLaw:
    closed_form         float weights, when sum |w_i| <= WEIGHT_CONDITION_LIMIT
    extended_precision  mpmath weights and sums, precision sized from sum |w_i|
    cf_inversion        Gil-Pelaez inversion of the characteristic function, for spectra with
                        eigenvalues closer than DEGENERACY_RELATIVE_TOLERANCE
"""

import logging
import math
from dataclasses import dataclass
from mimo3d._compat import StrEnum
from typing import Optional

import mpmath
import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate, optimize
from scipy.special import logsumexp

from mimo3d.core.antenna_array import SteeringMatrices
from mimo3d.core.channel import NoiseInterference

logger = logging.getLogger(__name__)

KERNEL_CONDITION_LIMIT = 1e12
NEGATIVE_EIGENVALUE_TOLERANCE = 1e-10
ZERO_EIGENVALUE_RELATIVE = 1e-12
DEGENERACY_RELATIVE_TOLERANCE = 1e-8
WEIGHT_CONDITION_LIMIT = 1e6

CF_TARGET_ABS_ERROR = 1e-8
CF_REFINEMENT_TOLERANCE = 1e-9
CF_MAX_REFINEMENTS = 12
CF_ENVELOPE_START = 1e-2
CF_QUAD_LIMIT = 2000


class ExactDistError(Exception):
    pass


class KernelConditioningError(ExactDistError):
    pass


class SpectrumError(ExactDistError):
    pass


class QuadratureError(ExactDistError):
    """Gil-Pelaez refinement failed to settle; carries the last estimates."""

    def __init__(self, message: str, x: float, estimates: list[float], truncation: float):
        super().__init__(
            f"{message} (x={x:.6g}, last estimates={estimates[-2:]}, truncation={truncation:.4g})"
        )
        self.x = x
        self.estimates = estimates
        self.truncation = truncation


class CdfMethod(StrEnum):
    CLOSED_FORM = "closed_form"
    EXTENDED_PRECISION = "extended_precision"
    CF_INVERSION = "cf_inversion"


@dataclass(frozen=True)
class ExactKernel:
    c_matrix: NDArray[np.complex128]

    @property
    def trace(self) -> float:
        return float(np.real(np.trace(self.c_matrix)))


@dataclass(frozen=True)
class EigenSpectrum:
    lambdas: NDArray[np.float64]  # descending, clamped at 0
    degeneracy_flag: bool

    @property
    def positive(self) -> NDArray[np.float64]:
        """Eigenvalues that carry mass; zeros contribute nothing to the law."""
        if self.lambdas[0] <= 0.0:
            return self.lambdas[:0]
        return self.lambdas[self.lambdas > ZERO_EIGENVALUE_RELATIVE * self.lambdas[0]]

    @property
    def total(self) -> float:
        return float(np.sum(self.lambdas))

    @classmethod
    def from_values(cls, values: ArrayLike) -> "EigenSpectrum":
        """Sort, clamp and flag a set of real eigenvalues.

        Raises:
            SpectrumError: Empty input or an eigenvalue below the negative tolerance.
        """
        array = np.asarray(values, dtype=float).ravel()
        if array.size == 0:
            raise SpectrumError("empty spectrum")
        scale = max(1.0, float(np.max(np.abs(array))))
        smallest = float(array.min())
        if smallest < -NEGATIVE_EIGENVALUE_TOLERANCE * scale:
            raise SpectrumError(f"eigenvalue {smallest:.3g} is materially negative")
        lambdas = np.sort(np.maximum(array, 0.0))[::-1].copy()
        lambdas.setflags(write=False)
        spectrum = cls(lambdas=lambdas, degeneracy_flag=False)
        positive = spectrum.positive
        if len(positive) > 1:
            gaps = (positive[:-1] - positive[1:]) / positive[:-1]
            if np.any(gaps < DEGENERACY_RELATIVE_TOLERANCE):
                spectrum = cls(lambdas=lambdas, degeneracy_flag=True)
        return spectrum


def build_exact_kernel(steering: SteeringMatrices, ni: NoiseInterference) -> ExactKernel:
    """C = (1/N) (B^H Omega B) o (A^H A)^T, Hermitian-symmetrized.

    Raises:
        KernelConditioningError: If R + sigma^2 I is too ill-conditioned to invert.
        ExactDistError: On an N_MS mismatch.
    """
    if steering.n_ms != ni.n_ms:
        raise ExactDistError(f"steering has {steering.n_ms} MS ports, noise model {ni.n_ms}")
    if ni.condition_number > KERNEL_CONDITION_LIMIT:
        raise KernelConditioningError(
            f"R + sigma^2 I condition number {ni.condition_number:.3g} exceeds "
            f"{KERNEL_CONDITION_LIMIT:.0e}"
        )
    b_omega_b = steering.b_matrix.conj().T @ ni.whitening @ steering.b_matrix
    gram = steering.a_matrix.conj().T @ steering.a_matrix
    c_matrix = (b_omega_b * gram.T) / steering.n_paths
    c_matrix = 0.5 * (c_matrix + c_matrix.conj().T)
    return ExactKernel(c_matrix=c_matrix)


def kernel_spectrum(kernel: ExactKernel) -> EigenSpectrum:
    eigenvalues = np.linalg.eigvalsh(kernel.c_matrix)
    spectrum = EigenSpectrum.from_values(eigenvalues)
    positive = spectrum.positive
    smallest = float(positive[-1]) if len(positive) else 0.0
    logger.debug(
        f"Kernel spectrum: {len(positive)} positive eigenvalues in "
        f"[{smallest:.4g}, {spectrum.lambdas[0]:.4g}], degenerate={spectrum.degeneracy_flag}"
    )
    return spectrum


def quadform_cf(spectrum: EigenSpectrum, t: ArrayLike) -> NDArray[np.complex128]:
    """prod_i 1 / (1 - j t lambda_i)."""
    t_array = np.asarray(t, dtype=float)
    factors = 1.0 - 1j * np.multiply.outer(t_array, spectrum.positive)
    return np.prod(1.0 / factors, axis=-1)


def _characteristic(scales: NDArray[np.float64], t: float) -> complex:
    return complex(np.prod(1.0 / (1.0 - 1j * t * scales)))


def _log_weight_condition(scales: NDArray[np.float64]) -> float:
    """log of sum_i |w_i| without forming the weights."""
    if len(scales) == 1:
        return 0.0
    differences = np.abs(scales[:, None] - scales[None, :])
    np.fill_diagonal(differences, 1.0)
    log_weights = (len(scales) - 1) * np.log(scales) - np.sum(np.log(differences), axis=1)
    return float(logsumexp(log_weights))


def _initial_truncation(scales: NDArray[np.float64]) -> float:
    """Smallest doubling of 1/lambda_max where the CF envelope drops below CF_ENVELOPE_START."""
    truncation = 1.0 / scales[0]
    log_floor = math.log(CF_ENVELOPE_START)
    while -0.5 * float(np.sum(np.log1p((truncation * scales) ** 2))) > log_floor:
        truncation *= 2.0
    return truncation


def _quad(func, low: float, high: float, **kwargs) -> float:
    result = integrate.quad(
        func, low, high, epsabs=CF_TARGET_ABS_ERROR * 1e-3, epsrel=1e-10, full_output=1, **kwargs
    )
    if len(result) > 3:
        logger.debug(f"quad on [{low:.4g}, {high:.4g}] reported: {result[3]}")
    return float(result[0])


def _gil_pelaez(scales: NDArray[np.float64], x: float) -> float:
    total = float(np.sum(scales))

    def finite_part(t: float) -> float:
        if t == 0.0:
            return total - x
        phi = _characteristic(scales, t)
        return (math.cos(t * x) * phi.imag - math.sin(t * x) * phi.real) / t

    def imag_over_t(t: float) -> float:
        return _characteristic(scales, t).imag / t

    def real_over_t(t: float) -> float:
        return _characteristic(scales, t).real / t

    truncation = _initial_truncation(scales)
    estimates: list[float] = []
    for _ in range(CF_MAX_REFINEMENTS):
        finite = _quad(finite_part, 0.0, truncation, limit=CF_QUAD_LIMIT)
        tail_cos = _quad(imag_over_t, truncation, np.inf, weight="cos", wvar=x)
        tail_sin = _quad(real_over_t, truncation, np.inf, weight="sin", wvar=x)
        estimates.append(0.5 - (finite + tail_cos - tail_sin) / math.pi)
        if len(estimates) > 1 and abs(estimates[-1] - estimates[-2]) < CF_REFINEMENT_TOLERANCE:
            return min(1.0, max(0.0, estimates[-1]))
        truncation *= 2.0

    raise QuadratureError("Gil-Pelaez inversion did not converge", x, estimates, truncation)


def cf_inversion_cdf(spectrum: EigenSpectrum, x: ArrayLike) -> NDArray[np.float64]:
    """CDF of alpha^H C alpha by numerical inversion of its characteristic function.

    Raises:
        QuadratureError: If successive truncation doublings keep disagreeing.
    """
    x_array = np.atleast_1d(np.asarray(x, dtype=float))
    scales = spectrum.positive
    result = np.zeros_like(x_array)
    if len(scales) == 0:
        result[x_array >= 0.0] = 1.0
        return result.reshape(np.shape(x))
    for index, value in enumerate(x_array):
        if value > 0.0:
            result[index] = _gil_pelaez(scales, float(value))
    return result.reshape(np.shape(x))


class HypoexponentialLaw:
    """Law of sum_i lambda_i E_i over the positive part of a spectrum.

    The weights are computed once; cdf() can then be evaluated on whole grids.
    """

    def __init__(self, spectrum: EigenSpectrum):
        self.spectrum = spectrum
        self.scales: NDArray[np.float64] = spectrum.positive
        self._weights: Optional[NDArray[np.float64]] = None
        self._mp_weights: list = []
        self._mp_scales: list = []
        self._dps = 0

        if len(self.scales) == 0:
            self.method = CdfMethod.CLOSED_FORM
            self.weight_condition = 0.0
            return

        if spectrum.degeneracy_flag:
            self.method = CdfMethod.CF_INVERSION
            self.weight_condition = math.inf
            logger.warning(
                "Near-equal eigenvalues in the spectrum; using characteristic-function inversion."
            )
            return

        log_condition = _log_weight_condition(self.scales)
        self.weight_condition = math.exp(min(log_condition, 700.0))
        if log_condition <= math.log(WEIGHT_CONDITION_LIMIT):
            self.method = CdfMethod.CLOSED_FORM
            with np.errstate(divide="ignore", invalid="ignore"):
                ratios = self.scales[:, None] / (self.scales[:, None] - self.scales[None, :])
            np.fill_diagonal(ratios, 1.0)
            self._weights = np.prod(ratios, axis=1)
        else:
            self.method = CdfMethod.EXTENDED_PRECISION
            self._dps = max(30, 20 + math.ceil(log_condition / math.log(10.0)))
            with mpmath.workdps(self._dps):
                self._mp_scales = [mpmath.mpf(float(scale)) for scale in self.scales]
                self._mp_weights = [
                    mpmath.fprod(
                        lam_i / (lam_i - lam_l)
                        for l, lam_l in enumerate(self._mp_scales)
                        if l != i
                    )
                    for i, lam_i in enumerate(self._mp_scales)
                ]
            logger.warning(
                f"Hypoexponential weights ill-conditioned (log10 sum|w| = "
                f"{log_condition / math.log(10.0):.1f}); evaluating at {self._dps} digits."
            )

    @property
    def mean(self) -> float:
        return float(np.sum(self.scales))

    def _extended_precision_cdf(self, value: float) -> float:
        with mpmath.workdps(self._dps):
            x_mp = mpmath.mpf(value)
            survival = mpmath.fsum(
                weight * mpmath.exp(-x_mp / scale)
                for weight, scale in zip(self._mp_weights, self._mp_scales)
            )
            return float(1 - survival)

    def cdf(self, x: ArrayLike) -> NDArray[np.float64]:
        x_array = np.atleast_1d(np.asarray(x, dtype=float))
        result = np.zeros_like(x_array)
        positive = x_array > 0.0

        if len(self.scales) == 0:
            result[x_array >= 0.0] = 1.0
        elif self.method == CdfMethod.CF_INVERSION:
            result = cf_inversion_cdf(self.spectrum, x_array)
        elif self.method == CdfMethod.CLOSED_FORM:
            assert self._weights is not None
            decay = np.exp(-np.multiply.outer(x_array[positive], 1.0 / self.scales))
            result[positive] = 1.0 - decay @ self._weights
        else:
            result[positive] = [self._extended_precision_cdf(float(v)) for v in x_array[positive]]

        return np.clip(result, 0.0, 1.0).reshape(np.shape(x))


def hypoexp_cdf(spectrum: EigenSpectrum, x: ArrayLike) -> NDArray[np.float64]:
    """P(sum_i lambda_i E_i <= x); falls back to CF inversion on degenerate spectra."""
    return HypoexponentialLaw(spectrum).cdf(x)


def hypoexp_mean(spectrum: EigenSpectrum) -> float:
    return spectrum.total


def theorem1_cdf(spectrum: EigenSpectrum, y: ArrayLike) -> NDArray[np.float64]:
    """CDF of the single-receive-port MI, F(e^y - 1), y in nats."""
    y_array = np.asarray(y, dtype=float)
    return hypoexp_cdf(spectrum, np.expm1(np.maximum(y_array, 0.0))) * (y_array >= 0.0)


def theorem2_cdf(spectrum: EigenSpectrum, x: ArrayLike) -> NDArray[np.float64]:
    """CDF of the low-SINR MI approximation Tr(Omega H H^H). Only accurate at low SINR."""
    return hypoexp_cdf(spectrum, x)


def theorem1_mean(spectrum: EigenSpectrum) -> float:
    """E[log(1 + X)] via int_0^inf e^-s (1 - E[e^-sX]) / s ds."""
    scales = spectrum.positive
    if len(scales) == 0:
        return 0.0
    total = float(np.sum(scales))

    def integrand(s: float) -> float:
        if s == 0.0:
            return total
        laplace_gap = -math.expm1(-float(np.sum(np.log1p(s * scales))))
        return math.exp(-s) * laplace_gap / s

    value, _ = integrate.quad(integrand, 0.0, np.inf, limit=500, epsabs=1e-12, epsrel=1e-10)
    return float(value)


def _bracketed_root(cdf, level: float, start: float) -> float:
    high = max(start, 1e-12)
    while float(cdf(high)) < level:
        high *= 2.0
        if high > 1e12:
            raise ExactDistError(f"couldn't bracket CDF level {level}")
    return float(optimize.brentq(lambda v: float(cdf(v)) - level, 0.0, high, xtol=1e-12))


def theorem1_quantile(spectrum: EigenSpectrum, level: float) -> float:
    """MI (nats) at which the single-receive-port MI CDF reaches level."""
    if not 0.0 < level < 1.0:
        raise ExactDistError(f"level must be in (0, 1), got {level}")
    law = HypoexponentialLaw(spectrum)
    if len(law.scales) == 0:
        return 0.0
    return _bracketed_root(
        lambda y: law.cdf(math.expm1(y)), level, math.log1p(law.mean) + 1.0
    )


def theorem2_quantile(spectrum: EigenSpectrum, level: float) -> float:
    if not 0.0 < level < 1.0:
        raise ExactDistError(f"level must be in (0, 1), got {level}")
    law = HypoexponentialLaw(spectrum)
    if len(law.scales) == 0:
        return 0.0
    return _bracketed_root(law.cdf, level, 2.0 * law.mean)
