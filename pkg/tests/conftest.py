# pylint: disable=redefined-outer-name
import numpy as np
import pytest

from mimo3d.core.antenna_array import SteeringMatrices
from mimo3d.core.channel import NoiseInterference
from mimo3d.core.harness.scenario import scenario_multicell
from mimo3d.models import ScenarioConfig

TEST_MASTER_SEED = 7


@pytest.fixture
def small_config() -> ScenarioConfig:
    """Two-cell layout shrunk to a size the unit tests can afford."""
    return ScenarioConfig(n_bs=4, n_ms=1, n_paths=12, trials=200, master_seed=TEST_MASTER_SEED)


@pytest.fixture
def two_port_config() -> ScenarioConfig:
    return ScenarioConfig(n_bs=6, n_ms=2, n_paths=16, trials=200, master_seed=TEST_MASTER_SEED)


@pytest.fixture
def small_scenario(small_config):
    return scenario_multicell(small_config)


@pytest.fixture
def two_port_scenario(two_port_config):
    return scenario_multicell(two_port_config)


@pytest.fixture
def random_steering():
    """Factory for unstructured complex steering matrices."""

    def make(n_bs: int, n_ms: int, n_paths: int, seed: int = 0) -> SteeringMatrices:
        rng = np.random.default_rng(seed)
        a_matrix = rng.standard_normal((n_bs, n_paths)) + 1j * rng.standard_normal((n_bs, n_paths))
        b_matrix = np.exp(1j * rng.uniform(-np.pi, np.pi, size=(n_ms, n_paths)))
        return SteeringMatrices(a_matrix=a_matrix, b_matrix=b_matrix)

    return make


@pytest.fixture
def noise_only():
    def make(n_ms: int, noise_variance: float = 1.0) -> NoiseInterference:
        return NoiseInterference.build(np.zeros((n_ms, n_ms), dtype=np.complex128), noise_variance)

    return make
