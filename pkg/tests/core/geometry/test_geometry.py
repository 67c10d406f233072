import math
from functools import partial

import numpy as np
import pytest
from scipy import special, stats

from mimo3d.core.geometry import (
    GeometryDomainError,
    GeometryError,
    PathAngles,
    angular_spectrum_for_site,
    azimuth_von_mises_cdf,
    elevation_laplacian_cdf,
    generate_path_angles,
    los_elevation_angle,
    sample_azimuth_von_mises,
    sample_elevation_laplacian,
)
from mimo3d.models import AngularSpectrumParams, SitePlacement, SpectraConfig
from mimo3d.utils.rng_streams import derive_seed_sequence

LARGE_SAMPLE = 100_000


def _placement(distance: float, bs_height: float = 25.0, ms_height: float = 1.5):
    return SitePlacement(
        bs_position=(0.0, 0.0),
        bs_height=bs_height,
        ms_position=(distance, 0.0),
        ms_height=ms_height,
    )


def _spectrum(**overrides) -> AngularSpectrumParams:
    values = {
        "elevation_mean_depart": math.radians(95.37),
        "elevation_spread_depart": math.radians(7.0),
        "elevation_mean_arrive": math.radians(95.37),
        "elevation_spread_arrive": math.radians(10.0),
        "azimuth_mean": 0.0,
        "azimuth_concentration": 5.0,
    }
    values.update(overrides)
    return AngularSpectrumParams(**values)


def test_los_elevation_cell_edge():
    assert math.degrees(los_elevation_angle(_placement(250.0))) == pytest.approx(95.37, abs=0.01)


def test_los_elevation_close_to_bs():
    assert math.degrees(los_elevation_angle(_placement(35.0))) == pytest.approx(123.88, abs=0.02)


def test_los_elevation_decreases_toward_horizontal():
    angles = [los_elevation_angle(_placement(d)) for d in (10.0, 50.0, 250.0, 1000.0, 1e7)]
    assert all(near > far for near, far in zip(angles, angles[1:]))
    assert angles[-1] == pytest.approx(math.pi / 2.0, abs=1e-5)


def test_los_elevation_near_coaltitude_is_horizontal():
    placement = _placement(250.0, bs_height=1.5 + 1e-9, ms_height=1.5)
    assert los_elevation_angle(placement) == pytest.approx(math.pi / 2.0, abs=1e-9)


def test_los_elevation_under_bs_raises():
    # model_construct skips the placement validator so the geometry check itself is exercised
    placement = SitePlacement.model_construct(
        bs_position=(10.0, 0.0), bs_height=25.0, ms_position=(10.0, 0.0), ms_height=1.5
    )
    with pytest.raises(GeometryDomainError):
        los_elevation_angle(placement)


def test_angular_spectrum_follows_site_los():
    placement = _placement(250.0)
    params = angular_spectrum_for_site(placement, SpectraConfig())
    los = los_elevation_angle(placement)
    assert math.degrees(los) == pytest.approx(95.37, abs=0.01)
    assert params.elevation_mean_depart == pytest.approx(los)
    assert params.elevation_mean_arrive == pytest.approx(los)
    assert params.elevation_spread_depart == pytest.approx(math.radians(7.0))


def test_angular_spectrum_keeps_pinned_mean():
    placement = _placement(250.0)
    params = angular_spectrum_for_site(placement, SpectraConfig(elevation_mean_arrive_deg=80.0))
    assert params.elevation_mean_arrive == pytest.approx(math.radians(80.0))
    assert params.elevation_mean_depart == pytest.approx(los_elevation_angle(placement))


def test_elevation_tiny_spread_collapses_to_mean():
    rng = np.random.default_rng(1)
    samples = sample_elevation_laplacian(1.2, 1e-9, 50, rng)
    np.testing.assert_allclose(samples, 1.2, atol=1e-7)


def test_elevation_median_and_std():
    rng = np.random.default_rng(2)
    mean, spread = math.radians(95.37), math.radians(7.0)
    samples = sample_elevation_laplacian(mean, spread, LARGE_SAMPLE, rng)

    median_se = (spread / math.sqrt(2.0)) / math.sqrt(LARGE_SAMPLE)
    assert abs(np.median(samples) - mean) < 5.0 * median_se
    assert np.std(samples) == pytest.approx(spread, rel=0.02)


def test_elevation_samples_stay_in_range():
    rng = np.random.default_rng(3)
    samples = sample_elevation_laplacian(0.05, 0.5, 5000, rng)
    assert samples.min() >= 0.0
    assert samples.max() <= math.pi


@pytest.mark.parametrize("mean, spread", [(1.0, 0.0), (1.0, -0.1), (-0.1, 0.1), (3.5, 0.1)])
def test_elevation_invalid_parameters(mean, spread):
    with pytest.raises(GeometryError):
        sample_elevation_laplacian(mean, spread, 10, np.random.default_rng(0))


def test_von_mises_uniform_when_unconcentrated():
    samples = sample_azimuth_von_mises(0.0, 0.0, LARGE_SAMPLE, np.random.default_rng(4))
    assert abs(np.mean(np.exp(1j * samples))) < 0.02


def test_von_mises_mean_resultant_length():
    samples = sample_azimuth_von_mises(0.0, 5.0, LARGE_SAMPLE, np.random.default_rng(5))
    expected = special.i1(5.0) / special.i0(5.0)
    assert expected == pytest.approx(0.8934, abs=1e-4)
    assert abs(np.mean(np.exp(1j * samples))) == pytest.approx(expected, rel=0.01)


def test_von_mises_concentrates_at_mean():
    samples = sample_azimuth_von_mises(0.3, 1e8, 100, np.random.default_rng(6))
    np.testing.assert_allclose(samples, 0.3, atol=1e-3)


def test_von_mises_wraps_into_half_open_interval():
    samples = sample_azimuth_von_mises(math.pi, 0.5, 10_000, np.random.default_rng(7))
    assert samples.min() > -math.pi
    assert samples.max() <= math.pi


def test_von_mises_negative_concentration():
    with pytest.raises(GeometryError):
        sample_azimuth_von_mises(0.0, -1.0, 10, np.random.default_rng(0))


def test_target_cdfs_are_distributions():
    mean, spread = math.radians(95.37), math.radians(7.0)
    assert elevation_laplacian_cdf(0.0, mean, spread) == pytest.approx(0.0, abs=1e-12)
    assert elevation_laplacian_cdf(math.pi, mean, spread) == pytest.approx(1.0)
    assert elevation_laplacian_cdf(mean, mean, spread) == pytest.approx(0.5, abs=1e-6)

    grid = np.linspace(-math.pi + 1e-3, math.pi, 200)
    values = azimuth_von_mises_cdf(grid, 0.4, 5.0)
    assert values[0] == pytest.approx(0.0, abs=1e-6)
    assert values[-1] == pytest.approx(1.0, abs=1e-6)
    assert np.all(np.diff(values) >= -1e-12)


def test_generate_path_angles_is_deterministic():
    params = _spectrum()
    first = generate_path_angles(params, 40, derive_seed_sequence(11, 1, 0))
    second = generate_path_angles(params, 40, derive_seed_sequence(11, 1, 0))
    other = generate_path_angles(params, 40, derive_seed_sequence(12, 1, 0))

    np.testing.assert_array_equal(first.depart_elevation, second.depart_elevation)
    np.testing.assert_array_equal(first.arrive_azimuth, second.arrive_azimuth)
    assert not np.array_equal(first.depart_elevation, other.depart_elevation)
    assert first.n_paths == 40
    assert not first.depart_azimuth.flags.writeable


def test_generate_single_degenerate_path():
    params = _spectrum(
        elevation_mean_depart=1.4,
        elevation_spread_depart=1e-10,
        elevation_mean_arrive=1.6,
        elevation_spread_arrive=1e-10,
        azimuth_mean=0.2,
        azimuth_concentration=1e9,
    )
    angles = generate_path_angles(params, 1, derive_seed_sequence(3, 1, 0))
    assert angles.depart_elevation[0] == pytest.approx(1.4, abs=1e-8)
    assert angles.arrive_elevation[0] == pytest.approx(1.6, abs=1e-8)
    assert angles.depart_azimuth[0] == pytest.approx(0.2, abs=1e-3)
    assert angles.arrive_azimuth[0] == pytest.approx(0.2, abs=1e-3)


def test_path_angle_marginals_match_targets():
    params = _spectrum()
    angles = generate_path_angles(params, 2000, derive_seed_sequence(20150901, 1, 0))

    elevation_depart = partial(
        elevation_laplacian_cdf,
        mean=params.elevation_mean_depart,
        spread=params.elevation_spread_depart,
    )
    elevation_arrive = partial(
        elevation_laplacian_cdf,
        mean=params.elevation_mean_arrive,
        spread=params.elevation_spread_arrive,
    )
    azimuth = partial(
        azimuth_von_mises_cdf,
        mean=params.azimuth_mean,
        concentration=params.azimuth_concentration,
    )

    assert stats.kstest(angles.depart_elevation, elevation_depart).pvalue > 0.001
    assert stats.kstest(angles.arrive_elevation, elevation_arrive).pvalue > 0.001
    assert stats.kstest(angles.depart_azimuth, azimuth).pvalue > 0.001
    assert stats.kstest(angles.arrive_azimuth, azimuth).pvalue > 0.001


def test_generate_path_angles_rejects_zero_paths():
    with pytest.raises(GeometryError):
        generate_path_angles(_spectrum(), 0, derive_seed_sequence(1, 1, 0))


def test_path_angles_validate_lengths():
    with pytest.raises(GeometryError):
        PathAngles(
            depart_azimuth=np.zeros(3),
            depart_elevation=np.ones(3),
            arrive_azimuth=np.zeros(2),
            arrive_elevation=np.ones(3),
        )
