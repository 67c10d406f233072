"""
This package contains the pydantic models for mimo3d.

Modules:
    physical_params: Radian/meter parameter types consumed by the core modules (SitePlacement,
        AngularSpectrumParams, AntennaPatternParams, ArrayGeometry, TiltConfig,
        ChannelNormalization,
        SnrReference).
    scenario_config: The YAML-facing ScenarioConfig (degrees and dB) with its sections and the
        conversions into physical_params.

Usage:
    from mimo3d.models import ScenarioConfig, SitePlacement
"""

from .pydantic.physical_params import (
    AngularSpectrumParams,
    AntennaPatternParams,
    ArrayGeometry,
    ChannelNormalization,
    SitePlacement,
    SnrReference,
    TiltConfig,
)
from .pydantic.scenario_config import (
    ArrayConfig,
    PatternConfig,
    ScenarioConfig,
    SiteConfig,
    SpectraConfig,
)

__all__ = [
    "AngularSpectrumParams",
    "AntennaPatternParams",
    "ArrayConfig",
    "ArrayGeometry",
    "ChannelNormalization",
    "PatternConfig",
    "ScenarioConfig",
    "SiteConfig",
    "SitePlacement",
    "SnrReference",
    "SpectraConfig",
    "TiltConfig",
]
