# mimo3d/core/harness/emit.py
"""CSV emission. Floats are written with 12 significant digits, so equal runs give equal bytes."""
import csv
import logging
from pathlib import Path
from typing import Iterable, Sequence, Union

from mimo3d.core.asymptotic_dist import AssumptionReport
from mimo3d.core.harness.comparison import CdfComparison, MomentRow
from mimo3d.core.harness.errors import EmitError, HarnessError
from mimo3d.core.harness.sweep import SweepTable

logger = logging.getLogger(__name__)

CDF_FILE = "cdf.csv"
SWEEP_FILE = "sweep.csv"
MOMENTS_FILE = "moments.csv"
DIAGNOSTICS_FILE = "diagnostics.csv"
CLT_FILE = "clt.csv"

PathLike = Union[str, Path]
Emittable = Union[CdfComparison, SweepTable, Sequence[MomentRow], AssumptionReport]


def _format(value: object) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _write_csv(path: PathLike, header: Sequence[str], rows: Iterable[Sequence[object]]) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="UTF8", newline="") as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([_format(value) for value in row])
    except OSError as e:
        raise EmitError(f"couldn't write {target.name}", target) from e
    logger.info(f"Wrote {target}")
    return target


def emit_cdf(comparison: CdfComparison, path: PathLike) -> Path:
    return _write_csv(path, ("mi_nats", "empirical_cdf", "analytical_cdf"), comparison.rows())


def emit_sweep(table: SweepTable, path: PathLike) -> Path:
    return _write_csv(
        path,
        ("tilt_deg", "mean_mi_nats", "mi_at_cdf_level"),
        ((row.tilt_deg, row.mean_mi_nats, row.mi_at_cdf_level) for row in table.rows),
    )


def emit_moments(rows: Sequence[MomentRow], path: PathLike) -> Path:
    return _write_csv(
        path,
        ("quantity", "monte_carlo", "analytical", "relative_error"),
        ((row.quantity, row.monte_carlo, row.analytical, row.relative_error) for row in rows),
    )


def emit_diagnostics(report: AssumptionReport, path: PathLike) -> Path:
    return _write_csv(path, ("quantity", "value", "threshold", "passed"), report.rows())


def emit_clt(rows: Sequence[tuple[int, float]], path: PathLike) -> Path:
    return _write_csv(path, ("n", "ks_distance"), rows)


def emit_results(result: Emittable, out_dir: PathLike) -> Path:
    """Write a result to its standard file name inside out_dir."""
    directory = Path(out_dir)
    if isinstance(result, CdfComparison):
        return emit_cdf(result, directory / CDF_FILE)
    if isinstance(result, SweepTable):
        return emit_sweep(result, directory / SWEEP_FILE)
    if isinstance(result, AssumptionReport):
        return emit_diagnostics(result, directory / DIAGNOSTICS_FILE)
    if isinstance(result, (list, tuple)) and all(isinstance(row, MomentRow) for row in result):
        return emit_moments(result, directory / MOMENTS_FILE)
    raise HarnessError(f"don't know how to emit {type(result).__name__}")
