import math

import numpy as np
import pytest
from scipy import integrate, special

from mimo3d.core.antenna_array import SteeringMatrices
from mimo3d.core.channel import (
    NoiseInterference,
    low_snr_mi,
    realize_channel,
    sample_gains,
)
from mimo3d.core.exact_dist import (
    CdfMethod,
    EigenSpectrum,
    ExactDistError,
    HypoexponentialLaw,
    KernelConditioningError,
    QuadratureError,
    SpectrumError,
    build_exact_kernel,
    cf_inversion_cdf,
    hypoexp_cdf,
    hypoexp_mean,
    kernel_spectrum,
    quadform_cf,
    theorem1_cdf,
    theorem1_mean,
    theorem1_quantile,
    theorem2_cdf,
    theorem2_quantile,
)
from mimo3d.core.harness.scenario import scenario_multicell
from mimo3d.models import ScenarioConfig

TWO_ONE = EigenSpectrum.from_values([2.0, 1.0])
TWO_ONE_AT_TWO = 1.0 - 2.0 * math.exp(-1.0) + math.exp(-2.0)


def test_all_ones_kernel(noise_only):
    n_paths = 4
    steering = SteeringMatrices(
        a_matrix=np.ones((1, n_paths), dtype=np.complex128),
        b_matrix=np.ones((1, n_paths), dtype=np.complex128),
    )
    kernel = build_exact_kernel(steering, noise_only(1, 1.0))
    np.testing.assert_allclose(kernel.c_matrix, np.ones((n_paths, n_paths)) / n_paths)

    spectrum = kernel_spectrum(kernel)
    assert spectrum.lambdas[0] == pytest.approx(1.0)
    np.testing.assert_allclose(spectrum.lambdas[1:], 0.0, atol=1e-12)
    assert len(spectrum.positive) == 1


def test_kernel_scales_with_omega(random_steering, noise_only):
    steering = random_steering(3, 2, 5)
    base = build_exact_kernel(steering, noise_only(2, 1.0)).c_matrix
    doubled = build_exact_kernel(steering, noise_only(2, 0.5)).c_matrix
    np.testing.assert_allclose(doubled, 2.0 * base)


def test_quadratic_form_equals_whitened_trace(random_steering):
    steering = random_steering(4, 2, 6, seed=2)
    root = np.array([[1.0, 0.3j], [0.0, 0.5]])
    ni = NoiseInterference.build(root @ root.conj().T, 0.8)
    kernel = build_exact_kernel(steering, ni)

    alpha = sample_gains(6, np.random.default_rng(1))
    quadratic = np.real(alpha.alpha.conj() @ kernel.c_matrix @ alpha.alpha)
    trace = low_snr_mi(realize_channel(steering, alpha), ni)
    assert quadratic == pytest.approx(trace, rel=1e-10)


def test_reference_kernel_is_psd():
    scenario = scenario_multicell(ScenarioConfig())
    kernel = build_exact_kernel(scenario.serving_steering, scenario.noise_interference)
    eigenvalues = np.linalg.eigvalsh(kernel.c_matrix)
    assert eigenvalues.min() >= -1e-10 * max(1.0, eigenvalues.max())
    assert kernel_spectrum(kernel).lambdas[0] > 0.0


def test_kernel_rejects_ill_conditioned_noise(random_steering):
    ni = NoiseInterference.build(np.diag([1e13, 0.0]).astype(np.complex128), 1.0)
    with pytest.raises(KernelConditioningError):
        build_exact_kernel(random_steering(2, 2, 3), ni)


def test_kernel_rejects_port_mismatch(random_steering, noise_only):
    with pytest.raises(ExactDistError):
        build_exact_kernel(random_steering(2, 2, 3), noise_only(3))


def test_characteristic_function_examples():
    assert quadform_cf(TWO_ONE, 0.0) == pytest.approx(1.0)
    assert quadform_cf(TWO_ONE, 1.0) == pytest.approx(1.0 / ((1.0 - 2.0j) * (1.0 - 1.0j)))

    identity = EigenSpectrum.from_values(np.ones(5))
    t = np.array([0.3, 1.7])
    np.testing.assert_allclose(quadform_cf(identity, t), (1.0 - 1j * t) ** -5)


def test_single_eigenvalue_is_exponential():
    x = np.array([0.0, 0.5, 2.0, 7.0])
    expected = 1.0 - np.exp(-x / 3.0)
    np.testing.assert_allclose(hypoexp_cdf(EigenSpectrum.from_values([3.0]), x), expected)


def test_two_term_hypoexponential():
    assert TWO_ONE_AT_TWO == pytest.approx(0.3996, abs=1e-4)
    assert hypoexp_cdf(TWO_ONE, 2.0) == pytest.approx(TWO_ONE_AT_TWO, abs=1e-12)
    assert HypoexponentialLaw(TWO_ONE).method == CdfMethod.CLOSED_FORM


def test_cdf_vanishes_at_origin():
    spectrum = EigenSpectrum.from_values([3.0, 1.5, 0.2, 0.05])
    assert hypoexp_cdf(spectrum, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert hypoexp_cdf(spectrum, -1.0) == 0.0
    assert theorem2_cdf(spectrum, 0.0) == pytest.approx(0.0, abs=1e-12)
    assert theorem1_cdf(spectrum, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_cdf_tends_to_one():
    spectrum = EigenSpectrum.from_values([3.0, 1.5, 0.2])
    assert hypoexp_cdf(spectrum, 500.0) == pytest.approx(1.0, abs=1e-12)


def test_theorem1_at_log_three():
    assert theorem1_cdf(TWO_ONE, math.log(3.0)) == pytest.approx(TWO_ONE_AT_TWO, abs=1e-12)


def test_degenerate_spectrum_uses_cf_inversion():
    spectrum = EigenSpectrum.from_values([1.0, 1.0])
    assert spectrum.degeneracy_flag
    law = HypoexponentialLaw(spectrum)
    assert law.method == CdfMethod.CF_INVERSION

    x = np.array([0.5, 1.0, 3.0])
    erlang = 1.0 - np.exp(-x) * (1.0 + x)
    np.testing.assert_allclose(law.cdf(x), erlang, atol=1e-8)


@pytest.mark.parametrize(
    "values",
    [[2.0, 1.0, 0.5], [1.0, 1.0], [4.0, 1.0, 1.0, 0.3]],
)
def test_cdf_is_nondecreasing(values):
    spectrum = EigenSpectrum.from_values(values)
    cdf = hypoexp_cdf(spectrum, np.linspace(0.0, 8.0 * spectrum.total, 40))
    assert np.all(np.diff(cdf) >= -1e-12)
    assert np.all((cdf >= 0.0) & (cdf <= 1.0))


def test_cdf_tail_integrates_to_mean():
    spectrum = EigenSpectrum.from_values([2.0, 1.0, 0.5])
    law = HypoexponentialLaw(spectrum)
    tail, _ = integrate.quad(
        lambda x: 1.0 - law.cdf(x)[0], 0.0, np.inf, epsabs=1e-12, epsrel=1e-12, limit=200
    )
    assert abs(tail - hypoexp_mean(spectrum)) < 1e-8


def test_spectrum_total_is_kernel_trace(random_steering, noise_only):
    kernel = build_exact_kernel(random_steering(5, 1, 9, seed=3), noise_only(1, 0.5))
    spectrum = kernel_spectrum(kernel)
    assert abs(hypoexp_mean(spectrum) - kernel.trace) <= 1e-10 * kernel.trace


def test_cf_inversion_agrees_with_closed_form():
    rng = np.random.default_rng(42)
    for _ in range(20):
        spectrum = EigenSpectrum.from_values(rng.uniform(0.05, 3.0, size=rng.integers(1, 6)))
        if spectrum.degeneracy_flag:
            continue
        law = HypoexponentialLaw(spectrum)
        x = np.array([0.25, 1.0, 2.5]) * spectrum.total
        np.testing.assert_allclose(cf_inversion_cdf(spectrum, x), law.cdf(x), atol=1e-6)


def test_ill_conditioned_weights_use_extended_precision():
    spectrum = EigenSpectrum.from_values(1.0 + 0.01 * np.arange(30))
    law = HypoexponentialLaw(spectrum)
    assert law.method == CdfMethod.EXTENDED_PRECISION
    assert law.weight_condition > 1e6

    x = np.array([20.0, 30.0, 40.0])
    np.testing.assert_allclose(law.cdf(x), cf_inversion_cdf(spectrum, x), atol=1e-6)


def test_zero_spectrum_is_point_mass():
    spectrum = EigenSpectrum.from_values([0.0, 0.0])
    np.testing.assert_array_equal(hypoexp_cdf(spectrum, [-1.0, 0.0, 2.0]), [0.0, 1.0, 1.0])
    assert theorem1_mean(spectrum) == 0.0


@pytest.mark.parametrize("values", [[], [1.0, -0.5]])
def test_spectrum_rejects_bad_values(values):
    with pytest.raises(SpectrumError):
        EigenSpectrum.from_values(values)


def test_spectrum_clamps_tiny_negatives():
    spectrum = EigenSpectrum.from_values([2.0, -1e-14, 0.5])
    np.testing.assert_array_equal(spectrum.lambdas, [2.0, 0.5, 0.0])
    assert hypoexp_mean(spectrum) == pytest.approx(2.5)


def test_theorem1_mean_single_exponential():
    spectrum = EigenSpectrum.from_values([2.0])
    expected = math.exp(0.5) * special.exp1(0.5)
    assert theorem1_mean(spectrum) == pytest.approx(expected, rel=1e-8)


def test_theorem1_mean_against_sampling():
    lambdas = np.array([1.5, 0.7, 0.2])
    rng = np.random.default_rng(0)
    samples = np.log1p(rng.exponential(size=(200_000, 3)) @ lambdas)
    standard_error = samples.std() / math.sqrt(len(samples))
    mean = theorem1_mean(EigenSpectrum.from_values(lambdas))
    assert abs(mean - samples.mean()) < 4.0 * standard_error


def test_quantiles_invert_cdfs():
    level = float(theorem1_cdf(TWO_ONE, math.log(3.0)))
    assert theorem1_quantile(TWO_ONE, level) == pytest.approx(math.log(3.0), abs=1e-8)
    assert theorem2_quantile(TWO_ONE, level) == pytest.approx(2.0, abs=1e-8)


@pytest.mark.parametrize("level", [0.0, 1.0, -0.2])
def test_quantile_rejects_level(level):
    with pytest.raises(ExactDistError):
        theorem1_quantile(TWO_ONE, level)


def test_quadrature_error_carries_diagnostics():
    error = QuadratureError("no luck", 1.5, [0.1, 0.2, 0.3], 64.0)
    assert error.x == 1.5
    assert error.estimates[-1] == 0.3
    assert error.truncation == 64.0
    assert "x=1.5" in str(error)
