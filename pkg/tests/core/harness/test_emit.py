import csv

import numpy as np
import pytest

from mimo3d.core.asymptotic_dist import AssumptionReport
from mimo3d.core.harness.comparison import CdfComparison, MomentRow
from mimo3d.core.harness.emit import (
    CLT_FILE,
    emit_clt,
    emit_results,
)
from mimo3d.core.harness.errors import EmitError, HarnessError
from mimo3d.core.harness.sweep import SweepMetric, SweepRow, SweepTable

COMPARISON = CdfComparison(
    grid=np.array([0.0, 0.5, 1.0]),
    empirical=np.array([0.0, 0.4, 1.0]),
    analytical=np.array([0.0, 0.5, 0.9]),
    ks_distance=0.1,
)


def _read(path):
    with open(path, "r", encoding="UTF8", newline="") as file:
        return list(csv.reader(file))


def test_emit_cdf(tmp_path):
    path = emit_results(COMPARISON, tmp_path / "run")
    assert path.name == "cdf.csv"
    assert _read(path) == [
        ["mi_nats", "empirical_cdf", "analytical_cdf"],
        ["0", "0", "0"],
        ["0.5", "0.4", "0.5"],
        ["1", "1", "0.9"],
    ]


def test_emit_sweep(tmp_path):
    table = SweepTable(
        rows=(SweepRow(95.0, 1.25, 0.5), SweepRow(96.0, 1.5, 0.625)),
        metric=SweepMetric.MEAN_MI,
        level=0.1,
    )
    rows = _read(emit_results(table, tmp_path))
    assert rows[0] == ["tilt_deg", "mean_mi_nats", "mi_at_cdf_level"]
    assert rows[2] == ["96", "1.5", "0.625"]


def test_emit_moments(tmp_path):
    rows = _read(emit_results([MomentRow("mi_mean", 1.1, 1.0)], tmp_path))
    assert rows[0] == ["quantity", "monte_carlo", "analytical", "relative_error"]
    assert rows[1][0] == "mi_mean"
    assert float(rows[1][3]) == pytest.approx(0.1)


def test_emit_diagnostics(tmp_path):
    report = AssumptionReport(dimension_ratio=0.5, norm_ratio=0.9, f_theta_f=2.0)
    rows = _read(emit_results(report, tmp_path))
    assert rows[0] == ["quantity", "value", "threshold", "passed"]
    assert rows[1] == ["n_bs_over_n_paths", "0.5", "[0.1, 10]", "true"]
    assert rows[2][3] == "false"


def test_emit_clt(tmp_path):
    rows = _read(emit_clt([(30, 0.05), (60, 0.03)], tmp_path / CLT_FILE))
    assert rows == [["n", "ks_distance"], ["30", "0.05"], ["60", "0.03"]]


def test_emission_is_byte_stable(tmp_path):
    first = emit_results(COMPARISON, tmp_path / "a").read_bytes()
    second = emit_results(COMPARISON, tmp_path / "b").read_bytes()
    assert first == second
    assert b"\r" not in first


def test_unwritable_target(tmp_path):
    blocker = tmp_path / "taken"
    blocker.write_text("not a directory")
    with pytest.raises(EmitError) as excinfo:
        emit_results(COMPARISON, blocker)
    assert excinfo.value.path == blocker / "cdf.csv"


def test_unknown_result_type(tmp_path):
    with pytest.raises(HarnessError):
        emit_results({"ks": 0.1}, tmp_path)
