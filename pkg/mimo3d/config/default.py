import logging
import os
from typing import Optional, Union

import yaml
from pydantic import ValidationError

from mimo3d.models import ScenarioConfig

logger = logging.getLogger(__name__)


class ConfigLoadError(Exception):
    pass


class Config:
    _initialized = False

    ENVIRONMENT = os.getenv("ENVIRONMENT", "local").lower()
    LOGGING_CONFIG_FILE: str = os.getenv("LOG_CFG", "./logging_config_local.yaml")

    # Scenario used when the CLI gets no --config.
    SCENARIO_CONFIG_FILE: str = os.getenv("SCENARIO_CFG", "./configs/multicell_tilt.yaml")
    OUTPUT_DIR: str = os.getenv("MIMO3D_OUT", "./results")

    WORKERS: int = 1

    @classmethod
    def initialize(cls) -> None:
        if cls._initialized:
            return

        if cls.ENVIRONMENT not in ["dev", "test", "local", "container", "prod"]:
            raise ValueError("Invalid ENVIRONMENT set.")

        try:
            cls.WORKERS = int(os.getenv("MIMO3D_WORKERS", "1"))
        except ValueError as e:
            raise ConfigLoadError("MIMO3D_WORKERS must be an integer") from e
        if cls.WORKERS < 1:
            raise ConfigLoadError(f"MIMO3D_WORKERS must be >= 1, got {cls.WORKERS}")

        cls._initialized = True

    @classmethod
    def load_scenario(cls, path: Optional[str] = None) -> ScenarioConfig:
        """Read and validate a scenario YAML file.

        An empty file yields the default scenario.

        Args:
            path (str | None): Scenario file; defaults to SCENARIO_CONFIG_FILE.

        Returns:
            ScenarioConfig: The validated scenario.

        Raises:
            ConfigLoadError: Missing or unreadable file, or YAML that isn't a mapping.
            pydantic.ValidationError: Values out of range.
        """
        if not cls._initialized:
            cls.initialize()

        scenario_path = path or cls.SCENARIO_CONFIG_FILE
        if not os.path.exists(scenario_path):
            raise ConfigLoadError(f"Scenario file not found: {scenario_path=}")

        try:
            with open(scenario_path, "r", encoding="UTF8") as file:
                raw: Union[dict, list, None] = yaml.safe_load(file)
        except (OSError, yaml.YAMLError) as e:
            raise ConfigLoadError(f"Couldn't read scenario file {scenario_path}") from e

        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigLoadError(f"scenario file holds {type(raw)} but needs be dict.")

        try:
            scenario = ScenarioConfig.model_validate(raw)
        except ValidationError:
            logger.error(f"Scenario file {scenario_path} failed validation.")
            raise

        logger.debug(f"Scenario loaded from {scenario_path}: {scenario.model_dump()}")
        return scenario
