import math

import numpy as np
import pytest

from mimo3d.core.channel import expected_gram, mean_port_power
from mimo3d.core.harness.scenario import retilt_serving, scenario_multicell
from mimo3d.models import ScenarioConfig, TiltConfig


def test_cell_edge_scenario_shares_los():
    scenario = scenario_multicell(ScenarioConfig(n_bs=4, n_paths=8))
    assert len(scenario.interferers) == 1
    for link in (scenario.serving, *scenario.interferers):
        assert math.degrees(link.los_elevation) == pytest.approx(95.37, abs=0.01)
    assert scenario.serving.name == "serving"


def test_interference_is_interferer_expected_gram(small_scenario):
    interferer = small_scenario.interferers[0]
    np.testing.assert_allclose(
        small_scenario.noise_interference.interference_cov, expected_gram(interferer.steering)
    )


def test_no_interference_reduces_to_noise(small_config):
    config = small_config.with_overrides(
        co_channel_interference=False, snr_db=10.0, snr_reference="absolute"
    )
    scenario = scenario_multicell(config)
    assert scenario.interferers == ()
    np.testing.assert_allclose(scenario.noise_interference.whitening, 10.0 * np.eye(1))


def test_noise_relative_to_serving_port_power(small_config):
    config = small_config.with_overrides(snr_db=-10.0)
    scenario = scenario_multicell(config)
    reference = mean_port_power(scenario.serving_steering)
    assert scenario.noise_interference.noise_variance == pytest.approx(10.0 * reference)


def test_noise_reference_ignores_serving_tilt(small_config):
    pointed = scenario_multicell(small_config)
    tilted = scenario_multicell(small_config.with_overrides(tilt_deg=100.0))
    assert mean_port_power(tilted.serving_steering) != pytest.approx(
        mean_port_power(pointed.serving_steering)
    )
    assert tilted.noise_interference.noise_variance == pytest.approx(
        pointed.noise_interference.noise_variance, rel=1e-12
    )


def test_serving_tilt_defaults_to_los(small_scenario):
    tilts = np.array(small_scenario.serving.tilts.per_port_tilt)
    np.testing.assert_allclose(tilts, small_scenario.serving.los_elevation)


def test_serving_tilt_override(small_config):
    scenario = scenario_multicell(small_config.with_overrides(tilt_deg=100.0))
    np.testing.assert_allclose(scenario.serving.tilts.per_port_tilt, math.radians(100.0))
    # interferer keeps pointing at its own LoS angle
    interferer = scenario.interferers[0]
    np.testing.assert_allclose(interferer.tilts.per_port_tilt, interferer.los_elevation)


def test_sites_draw_independent_angles(small_scenario):
    serving, interferer = small_scenario.serving.angles, small_scenario.interferers[0].angles
    assert not np.array_equal(serving.depart_elevation, interferer.depart_elevation)


def test_scenario_is_deterministic(small_config):
    first = scenario_multicell(small_config)
    second = scenario_multicell(small_config)
    np.testing.assert_array_equal(first.serving_steering.a_matrix, second.serving_steering.a_matrix)
    np.testing.assert_array_equal(
        first.noise_interference.interference_cov, second.noise_interference.interference_cov
    )


def test_retilt_keeps_angles(small_scenario):
    config = small_scenario.config
    same = retilt_serving(small_scenario, small_scenario.serving.tilts)
    np.testing.assert_array_equal(same.a_matrix, small_scenario.serving_steering.a_matrix)

    tilted = retilt_serving(small_scenario, TiltConfig.uniform(math.radians(100.0), config.n_bs))
    np.testing.assert_array_equal(tilted.b_matrix, small_scenario.serving_steering.b_matrix)
    assert not np.allclose(tilted.a_matrix, small_scenario.serving_steering.a_matrix)
