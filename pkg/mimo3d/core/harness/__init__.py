from .comparison import CdfComparison, MomentRow, compare_cdf, ks_critical_value
from .emit import emit_results
from .errors import ComparisonError, EmitError, HarnessError
from .monte_carlo import MonteCarloSamples, run_monte_carlo
from .scenario import MultiCellScenario, scenario_multicell
from .sweep import SweepMetric, SweepTable, sweep_tilt

__all__ = [
    "CdfComparison",
    "ComparisonError",
    "EmitError",
    "HarnessError",
    "MomentRow",
    "MonteCarloSamples",
    "MultiCellScenario",
    "SweepMetric",
    "SweepTable",
    "compare_cdf",
    "emit_results",
    "ks_critical_value",
    "run_monte_carlo",
    "scenario_multicell",
    "sweep_tilt",
]
