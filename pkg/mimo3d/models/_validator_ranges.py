# mimo3d/models/_validator_ranges.py
# A centralized spot for the numeric ranges and defaults used in parameter validation.
import math
from typing import Any

MAX_ELEVATION_RAD = math.pi
MAX_ELEVATION_DEG = 180.0
MAX_SEED = 2**64 - 1
SPEED_OF_LIGHT_M_PER_S = 299_792_458.0

# Multi-cell layout and radio parameters of the reference cell-edge scenario.
DEFAULT_INTER_SITE_DISTANCE_M = 500.0
DEFAULT_BS_HEIGHT_M = 25.0
DEFAULT_MS_HEIGHT_M = 1.5
DEFAULT_VERTICAL_3DB_DEG = 15.0
DEFAULT_HORIZONTAL_3DB_DEG = 70.0
DEFAULT_MAX_GAIN_DB = 17.0
DEFAULT_ATTENUATION_FLOOR_DB = 20.0
DEFAULT_ELEVATION_SPREAD_DEPART_DEG = 7.0
DEFAULT_ELEVATION_SPREAD_ARRIVE_DEG = 10.0
DEFAULT_AZIMUTH_MEAN_DEG = 0.0
DEFAULT_AZIMUTH_CONCENTRATION = 5.0
DEFAULT_CARRIER_FREQUENCY_HZ = 2.0e9
DEFAULT_SPACING_WAVELENGTHS = 0.5
DEFAULT_N_BS = 20
DEFAULT_N_MS = 1
DEFAULT_N_PATHS = 40
DEFAULT_SNR_DB = 5.0
DEFAULT_TRIALS = 2000
DEFAULT_MASTER_SEED = 20150901


def in_closed_range(value: Any, low: float, high: float) -> float:
    """Check that value is a finite real within [low, high]."""
    if not isinstance(value, (int, float)) or not low <= float(value) <= high:
        raise ValueError(f"{value} not in [{low}, {high}]")
    return float(value)


def in_open_range(value: Any, low: float, high: float) -> float:
    """Check that value is a finite real within (low, high)."""
    if not isinstance(value, (int, float)) or not low < float(value) < high:
        raise ValueError(f"{value} not in ({low}, {high})")
    return float(value)
