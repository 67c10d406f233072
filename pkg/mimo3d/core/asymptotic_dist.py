# mimo3d/core/asymptotic_dist.py
"""Gaussian approximation of the MI distribution for many BS ports and paths.

The entries of H H^H are quadratic forms in alpha:

    [H H^H]_kl = (1/N) alpha^H C^{k,l} alpha,   C^{k,l}_mn = conj(B_lm) B_kn [A^H A]_nm

Writing v = [Re alpha; Im alpha] turns their real and imaginary parts into real quadratic forms
v^T C_Re v and v^T C_Im v. The stacked vector x of these (real parts row-major over (k, l), then
imaginary parts) is asymptotically Gaussian; theta is the covariance of sqrt(N) x and the mean is
(R + sigma^2 I) + E[H H^H], split into M1 (real) and M2 (imaginary).

The MI equals 0.5 log det(M~) - log det(R + sigma^2 I) evaluated at the random matrix, with
M~ = [[M1, -M2], [M2, M1]]. A delta-method expansion around the mean gives

    mu = 0.5 log det M~ - log det(R + sigma^2 I)
    sigma_a^2 = (0.5 / det M~)^2 f^T theta f,   f = d det(M~) / d x

and MI ~ Normal(mu, sigma_a^2 / N).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg, stats

from mimo3d.core.antenna_array import SteeringMatrices
from mimo3d.core.channel import NoiseInterference

logger = logging.getLogger(__name__)

F_THETA_F_TOLERANCE = 1e-8
SAMPLE_CHUNK = 2000


class AsymptoticDistError(Exception):
    pass


class SingularMeanMatrixError(AsymptoticDistError):
    pass


class AssumptionViolationError(AsymptoticDistError):
    """f^T theta f / det(M~)^2 is too small for the Gaussian approximation to carry any spread."""


@dataclass(frozen=True)
class QuadKernels:
    kernels: NDArray[np.complex128]  # (M, M, N, N)

    @property
    def n_ms(self) -> int:
        return self.kernels.shape[0]

    @property
    def n_paths(self) -> int:
        return self.kernels.shape[2]


@dataclass(frozen=True)
class RealifiedKernels:
    c_re: NDArray[np.float64]  # (M, M, 2N, 2N)
    c_im: NDArray[np.float64]

    @property
    def n_ms(self) -> int:
        return self.c_re.shape[0]

    @property
    def n_paths(self) -> int:
        return self.c_re.shape[2] // 2

    def stacked(self) -> NDArray[np.float64]:
        """All 2 M^2 real kernels in x order: real parts row-major, then imaginary parts."""
        m_sq = self.n_ms**2
        size = self.c_re.shape[2]
        return np.concatenate(
            [self.c_re.reshape(m_sq, size, size), self.c_im.reshape(m_sq, size, size)]
        )


@dataclass(frozen=True)
class AsymptoticMoments:
    mean_vector: NDArray[np.float64]  # length 2 M^2
    theta: NDArray[np.float64]  # 2 M^2 x 2 M^2, covariance of sqrt(N) x


@dataclass(frozen=True)
class MeanMatrices:
    m1: NDArray[np.float64]
    m2: NDArray[np.float64]
    m_tilde: NDArray[np.float64]

    @property
    def complex_mean(self) -> NDArray[np.complex128]:
        return self.m1 + 1j * self.m2


@dataclass(frozen=True)
class GaussianMIApprox:
    m1: NDArray[np.float64]
    m2: NDArray[np.float64]
    m_tilde: NDArray[np.float64]
    f_vector: NDArray[np.float64]
    mu: float
    sigma_a_sq: float
    f_theta_f: float  # f^T theta f / det(M~)^2, i.e. 4 sigma_a^2

    def std(self, n_paths: int) -> float:
        """Standard deviation of the unscaled MI."""
        return math.sqrt(self.sigma_a_sq / n_paths)


@dataclass(frozen=True)
class DiagnosticThresholds:
    dimension_ratio_low: float = 0.1
    dimension_ratio_high: float = 10.0
    norm_ratio_max: float = 0.75  # rank-one kernels sit at 1
    f_theta_f_min: float = F_THETA_F_TOLERANCE


@dataclass(frozen=True)
class AssumptionReport:
    dimension_ratio: float
    norm_ratio: float
    f_theta_f: float
    thresholds: DiagnosticThresholds = field(default_factory=DiagnosticThresholds)

    @property
    def dimension_ratio_ok(self) -> bool:
        return (
            self.thresholds.dimension_ratio_low
            <= self.dimension_ratio
            <= self.thresholds.dimension_ratio_high
        )

    @property
    def norm_ratio_ok(self) -> bool:
        return self.norm_ratio <= self.thresholds.norm_ratio_max

    @property
    def f_theta_f_ok(self) -> bool:
        return self.f_theta_f >= self.thresholds.f_theta_f_min

    @property
    def passed(self) -> bool:
        return self.dimension_ratio_ok and self.norm_ratio_ok and self.f_theta_f_ok

    def rows(self) -> list[tuple[str, float, str, bool]]:
        t = self.thresholds
        return [
            (
                "n_bs_over_n_paths",
                self.dimension_ratio,
                f"[{t.dimension_ratio_low:g}, {t.dimension_ratio_high:g}]",
                self.dimension_ratio_ok,
            ),
            (
                "max_kernel_norm_ratio",
                self.norm_ratio,
                f"<= {t.norm_ratio_max:g}",
                self.norm_ratio_ok,
            ),
            (
                "f_theta_f_over_det_sq",
                self.f_theta_f,
                f">= {t.f_theta_f_min:g}",
                self.f_theta_f_ok,
            ),
        ]


def build_kernels(steering: SteeringMatrices) -> QuadKernels:
    """All C^{k,l}, with C^{l,k} set to the conjugate transpose of C^{k,l}."""
    gram_t = (steering.a_matrix.conj().T @ steering.a_matrix).T
    b_matrix = steering.b_matrix
    n_ms, n_paths = steering.n_ms, steering.n_paths

    kernels = np.empty((n_ms, n_ms, n_paths, n_paths), dtype=np.complex128)
    for k in range(n_ms):
        for l in range(k, n_ms):
            kernel = np.outer(b_matrix[l].conj(), b_matrix[k]) * gram_t
            if k == l:
                kernel = 0.5 * (kernel + kernel.conj().T)
            kernels[k, l] = kernel
            kernels[l, k] = kernel.conj().T
    return QuadKernels(kernels=kernels)


def realify_kernels(kernels: QuadKernels) -> RealifiedKernels:
    """C_Re = [[Re C, -Im C], [Im C, Re C]], C_Im = [[Im C, Re C], [-Re C, Im C]]."""
    real, imag = kernels.kernels.real, kernels.kernels.imag
    c_re = np.concatenate(
        [np.concatenate([real, -imag], axis=-1), np.concatenate([imag, real], axis=-1)],
        axis=-2,
    )
    c_im = np.concatenate(
        [np.concatenate([imag, real], axis=-1), np.concatenate([-real, imag], axis=-1)],
        axis=-2,
    )
    return RealifiedKernels(c_re=c_re, c_im=c_im)


def _check_paths(kernels: RealifiedKernels, n_paths: int) -> None:
    if kernels.n_paths != n_paths:
        raise AsymptoticDistError(f"kernels have {kernels.n_paths} paths, got {n_paths=}")


def _zeta_offsets(ni: NoiseInterference, n_ms: int) -> NDArray[np.float64]:
    if ni.n_ms != n_ms:
        raise AsymptoticDistError(f"noise model has {ni.n_ms} MS ports, kernels have {n_ms}")
    zeta = ni.zeta
    return np.concatenate([zeta.real.ravel(), zeta.imag.ravel()])


def build_moments(
    kernels: RealifiedKernels,
    ni: Optional[NoiseInterference],
    n_paths: int,
    include_offset: bool = True,
) -> AsymptoticMoments:
    """Mean of x and covariance theta of sqrt(N) x.

    Traces of products are sums of entrywise products of the flattened kernels, so no 2N x 2N
    product is formed.

    Args:
        kernels (RealifiedKernels): Real kernels.
        ni (NoiseInterference | None): Supplies the zeta offsets; may be None without offsets.
        n_paths (int): N.
        include_offset (bool): Add Re/Im of R + sigma^2 I to the mean. Without it the mean is
            that of the bare Gram entries.
    """
    _check_paths(kernels, n_paths)
    stacked = kernels.stacked()
    count = stacked.shape[0]
    flat = stacked.reshape(count, -1)
    flat_transposed = stacked.transpose(0, 2, 1).reshape(count, -1)

    # Tr(XY) pairs X with Y^T entrywise; Tr(XY^T) pairs X with Y.
    theta = (flat @ flat_transposed.T + flat @ flat.T) / (4.0 * n_paths)
    theta = 0.5 * (theta + theta.T)
    # Im of a diagonal Gram entry is identically zero; its rows only hold rounding residue.
    imag_diagonal = kernels.n_ms**2 + np.arange(kernels.n_ms) * (kernels.n_ms + 1)
    theta[imag_diagonal, :] = 0.0
    theta[:, imag_diagonal] = 0.0

    mean_vector = np.trace(stacked, axis1=1, axis2=2) / (2.0 * n_paths)
    if include_offset:
        if ni is None:
            raise AsymptoticDistError("zeta offsets requested without a noise model")
        mean_vector = mean_vector + _zeta_offsets(ni, kernels.n_ms)

    logger.debug(
        f"Moments built: {count} stacked entries, trace(theta)={np.trace(theta):.6g}"
    )
    return AsymptoticMoments(mean_vector=mean_vector, theta=theta)


def build_mean_matrices(
    kernels: RealifiedKernels, ni: NoiseInterference, n_paths: int
) -> MeanMatrices:
    _check_paths(kernels, n_paths)
    n_ms = kernels.n_ms
    zeta = ni.zeta
    if zeta.shape[0] != n_ms:
        raise AsymptoticDistError(f"noise model has {zeta.shape[0]} MS ports, kernels have {n_ms}")
    m1 = zeta.real + np.trace(kernels.c_re, axis1=2, axis2=3) / (2.0 * n_paths)
    m2 = zeta.imag + np.trace(kernels.c_im, axis1=2, axis2=3) / (2.0 * n_paths)
    m_tilde = np.block([[m1, -m2], [m2, m1]])
    return MeanMatrices(m1=m1, m2=m2, m_tilde=m_tilde)


def _factor(m_tilde: NDArray[np.float64]) -> tuple[float, NDArray[np.float64]]:
    """det(M~) and its inverse from one LU factorization."""
    lu, piv = linalg.lu_factor(m_tilde)
    diagonal = np.diag(lu)
    scale = float(np.max(np.abs(diagonal)))
    floor = np.finfo(float).eps * scale * len(diagonal)
    if scale == 0.0 or float(np.min(np.abs(diagonal))) <= floor:
        raise SingularMeanMatrixError("stacked mean matrix is singular")
    swaps = int(np.sum(piv != np.arange(len(piv))))
    determinant = (-1.0) ** swaps * float(np.prod(diagonal))
    inverse = linalg.lu_solve((lu, piv), np.eye(len(diagonal)))
    return determinant, inverse


def det_gradient(
    m_tilde: NDArray[np.float64], m1: NDArray[np.float64], m2: NDArray[np.float64]
) -> NDArray[np.float64]:
    """Gradient of det(M~) with respect to the entries of M1, then of M2 (row-major).

    Jacobi: d det / d M~_ij = det * inv(M~)_ji. An M1 entry (k, l) sits at (k, l) and (M+k, M+l);
    an M2 entry sits at (M+k, l) with sign + and at (k, M+l) with sign -.

    Raises:
        SingularMeanMatrixError: If M~ is singular.
        AsymptoticDistError: If m_tilde isn't the stacking of m1 and m2.
    """
    n_ms = m1.shape[0]
    expected = np.block([[m1, -m2], [m2, m1]])
    if m_tilde.shape != expected.shape or not np.allclose(m_tilde, expected, rtol=1e-12, atol=0.0):
        raise AsymptoticDistError("m_tilde is not [[M1, -M2], [M2, M1]]")

    determinant, inverse = _factor(m_tilde)
    adjugate_t = determinant * inverse.T
    grad_m1 = adjugate_t[:n_ms, :n_ms] + adjugate_t[n_ms:, n_ms:]
    grad_m2 = adjugate_t[n_ms:, :n_ms] - adjugate_t[:n_ms, n_ms:]
    return np.concatenate([grad_m1.ravel(), grad_m2.ravel()])


def theorem4_params(
    moments: AsymptoticMoments,
    mean_matrices: MeanMatrices,
    ni: NoiseInterference,
    enforce_nondegenerate: bool = True,
) -> GaussianMIApprox:
    """Mean and variance constant of the Gaussian MI approximation.

    Raises:
        SingularMeanMatrixError: det(M~) <= 0.
        AssumptionViolationError: f^T theta f / det(M~)^2 <= F_THETA_F_TOLERANCE while
            enforce_nondegenerate is set.
    """
    f_vector = det_gradient(mean_matrices.m_tilde, mean_matrices.m1, mean_matrices.m2)
    sign, log_det = np.linalg.slogdet(mean_matrices.m_tilde)
    if sign <= 0:
        raise SingularMeanMatrixError("det of the stacked mean matrix is not positive")

    # Divide by det before forming the quadratic form; det M~ can be large. The result doesn't
    # change when R, sigma^2 and the channel power are scaled together.
    scaled = f_vector / math.exp(log_det)
    f_theta_f = float(scaled @ moments.theta @ scaled)
    if enforce_nondegenerate and f_theta_f <= F_THETA_F_TOLERANCE:
        raise AssumptionViolationError(
            f"f^T theta f / det(M~)^2 = {f_theta_f:.3g} <= {F_THETA_F_TOLERANCE:g}; "
            f"the Gaussian approximation is degenerate for this scenario"
        )
    sigma_a_sq = 0.25 * f_theta_f
    mu = float(0.5 * log_det - ni.log_det_zeta)
    logger.info(f"Gaussian MI approximation: mu={mu:.6g} nats, sigma_a^2={sigma_a_sq:.6g}")
    return GaussianMIApprox(
        m1=mean_matrices.m1,
        m2=mean_matrices.m2,
        m_tilde=mean_matrices.m_tilde,
        f_vector=f_vector,
        mu=mu,
        sigma_a_sq=sigma_a_sq,
        f_theta_f=f_theta_f,
    )


def theorem4_cdf(approx: GaussianMIApprox, n_paths: int, x: ArrayLike) -> NDArray[np.float64]:
    """Normal(mu, sigma_a^2 / N) CDF of the unscaled MI."""
    return stats.norm.cdf(x, loc=approx.mu, scale=approx.std(n_paths))


def theorem4_quantile(approx: GaussianMIApprox, n_paths: int, level: float) -> float:
    return float(stats.norm.ppf(level, loc=approx.mu, scale=approx.std(n_paths)))


def sample_stacked_gram(
    kernels: QuadKernels, n_paths: int, draws: int, rng: np.random.Generator
) -> NDArray[np.float64]:
    """Draws of sqrt(N) x (no zeta offsets), for checking the moment formulas.

    Returns:
        NDArray: Shape (draws, 2 M^2).
    """
    if kernels.n_paths != n_paths:
        raise AsymptoticDistError(f"kernels have {kernels.n_paths} paths, got {n_paths=}")
    n_ms = kernels.n_ms
    samples = np.empty((draws, 2 * n_ms * n_ms))
    for start in range(0, draws, SAMPLE_CHUNK):
        size = min(SAMPLE_CHUNK, draws - start)
        alpha = (rng.standard_normal((size, n_paths)) + 1j * rng.standard_normal((size, n_paths)))
        alpha /= np.sqrt(2.0)
        forms = np.einsum("dm,klmn,dn->dkl", alpha.conj(), kernels.kernels, alpha, optimize=True)
        gram = forms.reshape(size, -1) / n_paths
        samples[start : start + size] = np.sqrt(n_paths) * np.concatenate(
            [gram.real, gram.imag], axis=1
        )
    return samples


def assumption_diagnostics(
    steering: SteeringMatrices,
    kernels: QuadKernels,
    approx: GaussianMIApprox,
    thresholds: Optional[DiagnosticThresholds] = None,
) -> AssumptionReport:
    """Dimension ratio, worst kernel spectral/Frobenius ratio and f^T theta f / det(M~)^2."""
    thresholds = thresholds or DiagnosticThresholds()
    norm_ratio = 0.0
    for k in range(kernels.n_ms):
        for l in range(kernels.n_ms):
            frobenius = np.linalg.norm(kernels.kernels[k, l], "fro")
            if frobenius > 0.0:
                spectral = np.linalg.norm(kernels.kernels[k, l], 2)
                norm_ratio = max(norm_ratio, float(spectral / frobenius))

    report = AssumptionReport(
        dimension_ratio=steering.n_bs / steering.n_paths,
        norm_ratio=norm_ratio,
        f_theta_f=approx.f_theta_f,
        thresholds=thresholds,
    )
    for name, value, bound, ok in report.rows():
        if not ok:
            logger.warning(f"Assumption check {name}={value:.4g} outside {bound}")
    return report
