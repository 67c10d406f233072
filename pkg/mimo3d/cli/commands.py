# mimo3d/cli/commands.py
"""Command-line entry point: one subcommand per validation pipeline, plus the sweep.

Exit codes: 0 success, 1 library or config error, 2 a validation criterion failed.
"""
import argparse
import logging
import os
from pathlib import Path
from typing import Callable, Optional, Sequence

from pydantic import ValidationError

from mimo3d.config import Config, ConfigLoadError
from mimo3d.core.antenna_array import SteeringError
from mimo3d.core.asymptotic_dist import AsymptoticDistError
from mimo3d.core.channel import ChannelError
from mimo3d.core.exact_dist import ExactDistError
from mimo3d.core.geometry import GeometryError
from mimo3d.core.harness import HarnessError, emit_results
from mimo3d.core.harness.emit import CLT_FILE, emit_clt
from mimo3d.core.harness.scenario import scenario_multicell
from mimo3d.core.harness.sweep import (
    DEFAULT_CDF_LEVEL,
    SweepMetric,
    compare_tilt,
    sweep_tilt,
    tilt_grid,
)
from mimo3d.core.harness.validation import (
    DEFAULT_ASYMPTOTIC_SNRS_DB,
    DEFAULT_CLT_SIZES,
    DEFAULT_LOWSNR_SNRS_DB,
    ValidationOutcome,
    run_diagnostics,
    validate_asymptotic,
    validate_clt,
    validate_exact,
    validate_lowsnr,
)
from mimo3d.models import ScenarioConfig
from mimo3d.utils.log_util import setup_logging
from mimo3d.utils.trial_pool import TrialPoolError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CRITERION_FAILED = 2

LIBRARY_ERRORS = (
    ConfigLoadError,
    ValidationError,
    GeometryError,
    SteeringError,
    ChannelError,
    ExactDistError,
    AsymptoticDistError,
    HarnessError,
    TrialPoolError,
)

Command = Callable[[argparse.Namespace, ScenarioConfig, Path, int], bool]


def _write_outcome(outcome: ValidationOutcome, out_dir: Path) -> None:
    if outcome.comparison is not None:
        emit_results(outcome.comparison, out_dir)
    if outcome.moments:
        emit_results(list(outcome.moments), out_dir)
    verdict = "PASS" if outcome.passed else "FAIL"
    logger.info(f"[{verdict}] {outcome.name}: {outcome.detail}")
    print(f"{outcome.name}: {verdict} ({outcome.detail})", flush=True)


def _run_validate_exact(
    args: argparse.Namespace, config: ScenarioConfig, out_dir: Path, workers: int
) -> bool:
    outcome = validate_exact(config, workers=workers)
    _write_outcome(outcome, out_dir)
    return outcome.passed


def _run_validate_lowsnr(
    args: argparse.Namespace, config: ScenarioConfig, out_dir: Path, workers: int
) -> bool:
    snrs = args.snr_db or list(DEFAULT_LOWSNR_SNRS_DB)
    outcomes = validate_lowsnr(config, snrs, workers=workers)
    for snr_db, outcome in zip(snrs, outcomes):
        _write_outcome(outcome, out_dir / f"snr_{snr_db:g}dB")
    return all(outcome.passed for outcome in outcomes)


def _run_validate_asymptotic(
    args: argparse.Namespace, config: ScenarioConfig, out_dir: Path, workers: int
) -> bool:
    snrs = args.snr_db or list(DEFAULT_ASYMPTOTIC_SNRS_DB)
    outcomes = validate_asymptotic(config, snrs, workers=workers)
    for snr_db, outcome in zip(snrs, outcomes):
        _write_outcome(outcome, out_dir / f"snr_{snr_db:g}dB")
    return all(outcome.passed for outcome in outcomes)


def _run_validate_clt(
    args: argparse.Namespace, config: ScenarioConfig, out_dir: Path, workers: int
) -> bool:
    outcome = validate_clt(config, sizes=args.sizes or list(DEFAULT_CLT_SIZES), workers=workers)
    emit_clt(outcome.rows, out_dir / CLT_FILE)
    for size, ks in outcome.rows:
        print(f"N = {size}: KS {ks:.4f}", flush=True)
    print(f"clt: {'PASS' if outcome.passed else 'FAIL'}", flush=True)
    return outcome.passed


def _run_sweep_tilt(
    args: argparse.Namespace, config: ScenarioConfig, out_dir: Path, workers: int
) -> bool:
    scenario = scenario_multicell(config)
    grid = tilt_grid(args.start, args.stop, args.step)
    table = sweep_tilt(
        config,
        grid,
        metric=SweepMetric(args.metric),
        level=args.level,
        scenario=scenario,
        workers=workers,
    )
    emit_results(table, out_dir)
    print(f"best tilt by {table.metric}: {table.argmax_tilt_deg:g} deg", flush=True)
    if args.with_mc:
        for tilt_deg in grid:
            comparison = compare_tilt(scenario, tilt_deg, workers=workers)
            emit_results(comparison, out_dir / f"tilt_{tilt_deg:g}")
            print(f"tilt {tilt_deg:g} deg: Monte Carlo KS {comparison.ks_distance:.4f}", flush=True)
    return True


def _run_diagnostics(
    args: argparse.Namespace, config: ScenarioConfig, out_dir: Path, workers: int
) -> bool:
    report = run_diagnostics(config)
    emit_results(report, out_dir)
    for quantity, value, threshold, passed in report.rows():
        print(f"{quantity}: {value:.6g} ({threshold}) {'ok' if passed else 'VIOLATED'}")
    return report.passed


COMMANDS: dict[str, tuple[Command, str]] = {
    "validate-exact": (_run_validate_exact, "Exact single-port MI law vs Monte Carlo."),
    "validate-lowsnr": (_run_validate_lowsnr, "Low-SINR trace law vs Monte Carlo."),
    "validate-asymptotic": (
        _run_validate_asymptotic,
        "Gaussian MI approximation vs Monte Carlo, with moment checks.",
    ),
    "validate-clt": (_run_validate_clt, "KS trend of the Gaussian approximation as N grows."),
    "sweep-tilt": (
        _run_sweep_tilt,
        "Serving-BS downtilt sweep on the analytical law, optionally checked by Monte Carlo.",
    ),
    "diagnostics": (_run_diagnostics, "Report the Gaussian-approximation assumptions."),
}


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Scenario YAML (default: $SCENARIO_CFG).")
    parser.add_argument("--seed", type=int, help="Override master_seed.")
    parser.add_argument("--trials", type=int, help="Override the Monte Carlo trial count.")
    parser.add_argument("--out", help="Output directory (default: $MIMO3D_OUT/<command>).")
    parser.add_argument("--workers", type=int, help="Worker processes (default: $MIMO3D_WORKERS).")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mimo3d", description=__doc__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, (_, help_text) in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text)
        _add_common_flags(sub)
        if name == "validate-lowsnr":
            sub.add_argument(
                "--snr-db", type=float, action="append", help="Repeatable; default -20 and 5."
            )
        elif name == "validate-asymptotic":
            sub.add_argument(
                "--snr-db",
                type=float,
                action="append",
                help="Repeatable; default -20, 0, 20 and 40. KS is judged at the lowest, "
                "MI moments at the highest.",
            )
        elif name == "validate-clt":
            sub.add_argument("--sizes", type=int, nargs="+", help="Values of N_BS = N.")
        elif name == "sweep-tilt":
            sub.add_argument("--start", type=float, default=85.0, help="First tilt, degrees.")
            sub.add_argument("--stop", type=float, default=105.0, help="Last tilt, degrees.")
            sub.add_argument("--step", type=float, default=1.0, help="Grid step, degrees.")
            sub.add_argument(
                "--metric",
                choices=[metric.value for metric in SweepMetric],
                default=SweepMetric.MEAN_MI.value,
            )
            sub.add_argument("--level", type=float, default=DEFAULT_CDF_LEVEL)
            sub.add_argument(
                "--with-mc",
                action="store_true",
                help="Also run the Monte Carlo at every tilt and write tilt_<deg>/cdf.csv.",
            )

    return parser


def _resolve_config(args: argparse.Namespace) -> ScenarioConfig:
    config = Config.load_scenario(args.config)
    return config.with_overrides(master_seed=args.seed, trials=args.trials)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(Config.LOGGING_CONFIG_FILE)

    try:
        Config.initialize()
        config = _resolve_config(args)
        out_dir = Path(args.out or os.path.join(Config.OUTPUT_DIR, args.command))
        workers = args.workers or Config.WORKERS
        logger.info(
            f"{args.command}: seed {config.master_seed}, {config.trials} trials, "
            f"{workers} worker(s), output {out_dir}"
        )
        run, _ = COMMANDS[args.command]
        passed = run(args, config, out_dir, workers)
    except LIBRARY_ERRORS as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_ERROR

    return EXIT_OK if passed else EXIT_CRITERION_FAILED
