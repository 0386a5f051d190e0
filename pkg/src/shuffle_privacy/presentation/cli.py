"""Command-line front-end emitting CSV for calibrations, sweeps, oracle checks and simulations."""

from __future__ import annotations

import argparse
import logging
import math
import re
import sys
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import TextIO

from shuffle_privacy.application.blanket import gamma_lower_bound, laplace_gamma
from shuffle_privacy.application.calibration import calibrate_epsilon, calibrate_epsilon0
from shuffle_privacy.application.errors import ShufflePrivacyError
from shuffle_privacy.application.oracle import oracle_sweep
from shuffle_privacy.application.randomizers import krr_gamma
from shuffle_privacy.application.settings import BisectionSettings, SimulationSettings
from shuffle_privacy.application.simulation import mse_experiment
from shuffle_privacy.domain.experiment import (
    SWEEP_COLUMNS,
    InputDistribution,
    InputGenerator,
    SweepRow,
)
from shuffle_privacy.domain.privacy import (
    METHODS_BY_NAME,
    AmplificationMethod,
    CertifiedBy,
    MechanismFamily,
    PrivacyBudget,
)
from shuffle_privacy.infrastructure.csv_output import CsvValue, write_csv, write_csv_file
from shuffle_privacy.infrastructure.logging_config import configure_logging

LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PROPERTY_VIOLATION = 1
EXIT_INVALID_INPUT = 2

ORACLE_COLUMNS = ("n", "k", "eps0", "eps", "exact", "mixture_exact", "hoeffding", "bennett")
SIMULATE_COLUMNS = (
    "n",
    "eps",
    "delta",
    "trials",
    "empirical_mse",
    "empirical_bias",
    "theoretical_bound",
    "seed",
)
_CONSTANT_PATTERN = re.compile(r"^constant(?P<value>[0-9]*\.?[0-9]+)?$")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shuffle-privacy",
        description="Privacy amplification by shuffling: bounds, calibration, oracle, simulation.",
    )
    parser.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="log records go to stderr (default WARNING)",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    calibrate = commands.add_parser("calibrate", help="solve one bound for epsilon or eps0")
    calibrate.add_argument("--method", required=True, choices=sorted(METHODS_BY_NAME))
    calibrate.add_argument("--mechanism", choices=[family.value for family in MechanismFamily])
    _add_budget_arguments(calibrate)
    calibrate.add_argument("--n", type=_parse_int, required=True)
    calibrate.set_defaults(handler=_cmd_calibrate)

    sweep = commands.add_parser("sweep", help="calibrate every (method, n) cell of a grid")
    sweep.add_argument("--methods", type=_parse_methods, required=True)
    sweep.add_argument("--n-grid", type=_int_list, required=True)
    _add_budget_arguments(sweep)
    sweep.add_argument(
        "--k-cube-root", action="store_true", help="use k = ceil(n^(1/3)) for rr methods"
    )
    sweep.add_argument(
        "--delta-exponent", type=float, help="use delta = n^(-p) per cell instead of --delta"
    )
    sweep.add_argument("--workers", type=_parse_int, default=1)
    sweep.add_argument("--out", type=Path, help="CSV file (default stdout)")
    sweep.set_defaults(handler=_cmd_sweep)

    oracle = commands.add_parser("oracle", help="exact-oracle soundness sweep for k-RR")
    oracle.add_argument("--n-max", type=_parse_int, default=8)
    oracle.add_argument("--k-set", type=_int_list, default=[2, 3])
    oracle.add_argument("--eps0-grid", type=_real_list, default=[0.5, 1.0, 2.0])
    oracle.add_argument(
        "--eps-grid",
        type=_real_list,
        default=[0.1, 0.3, 0.7],
        help="epsilon values as fractions of each eps0",
    )
    oracle.add_argument("--out", type=Path, help="CSV file (default stdout)")
    oracle.set_defaults(handler=_cmd_oracle)

    simulate = commands.add_parser("simulate", help="Monte Carlo MSE of the summation protocol")
    simulate.add_argument("--n", type=_parse_int, required=True)
    simulate.add_argument("--eps", type=float, required=True)
    simulate.add_argument("--delta", type=float, required=True)
    simulate.add_argument("--trials", type=_parse_int, default=100)
    simulate.add_argument(
        "--dist",
        type=_parse_distribution,
        default=InputGenerator(InputDistribution.UNIFORM),
        help="constant<v> (e.g. constant0), grid, uniform or two-point",
    )
    simulate.add_argument("--seed", type=_parse_int, default=0)
    simulate.add_argument("--workers", type=_parse_int, default=1)
    simulate.set_defaults(handler=_cmd_simulate)
    return parser


def run(argv: Sequence[str] | None = None, *, stdout: TextIO | None = None) -> int:
    """Parse argv, run one subcommand and return its exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    handler: Callable[[argparse.Namespace, TextIO], int] = args.handler
    try:
        return handler(args, stdout or sys.stdout)
    except (ShufflePrivacyError, ValueError) as exc:
        LOGGER.debug("event=cli_rejected command=%s error=%s", args.command, type(exc).__name__)
        print(f"shuffle-privacy {args.command}: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT


def _cmd_calibrate(args: argparse.Namespace, stdout: TextIO) -> int:
    method = AmplificationMethod.from_name(args.method)
    if args.mechanism is not None and args.mechanism != method.mechanism.value:
        raise ValueError(
            f"Method {method.name} bounds the {method.mechanism.value} mechanism, "
            f"not {args.mechanism}."
        )
    _require_domain_size(method, args.k)
    settings = BisectionSettings(clamp=not args.no_clamp)
    row = _calibrate_row(method, args.n, args.eps0, args.eps, args.delta, args.k, settings)
    write_csv(stdout, SWEEP_COLUMNS, [row.as_row()])
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace, stdout: TextIO) -> int:
    methods: list[AmplificationMethod] = args.methods
    for method in methods:
        if not args.k_cube_root:
            _require_domain_size(method, args.k)
    settings = BisectionSettings(clamp=not args.no_clamp)

    def cell(job: tuple[AmplificationMethod, int]) -> SweepRow:
        method, n = job
        delta = n ** (-args.delta_exponent) if args.delta_exponent is not None else args.delta
        k = math.ceil(round(n ** (1.0 / 3.0), 9)) if args.k_cube_root else args.k
        try:
            return _calibrate_row(method, n, args.eps0, args.eps, delta, k, settings)
        except ShufflePrivacyError as exc:
            LOGGER.warning(
                "event=sweep_cell_infeasible method=%s n=%s error=%s",
                method.name,
                n,
                type(exc).__name__,
            )
            return _infeasible_row(method, n, args.eps0, args.eps, delta, k)

    jobs = [(method, n) for method in methods for n in args.n_grid]
    with ThreadPoolExecutor(max_workers=max(1, args.workers)) as executor:
        rows = list(executor.map(cell, jobs))
    rows.sort(key=lambda row: (row.method, row.n))
    _emit(args.out, stdout, SWEEP_COLUMNS, [row.as_row() for row in rows])
    return EXIT_OK


def _cmd_oracle(args: argparse.Namespace, stdout: TextIO) -> int:
    cells = oracle_sweep(args.n_max, args.k_set, args.eps0_grid, args.eps_grid)
    rows: list[tuple[CsvValue, ...]] = [
        (
            cell.n,
            cell.k,
            cell.epsilon0,
            cell.epsilon,
            cell.exact,
            cell.mixture_exact,
            cell.hoeffding,
            cell.bennett,
        )
        for cell in cells
    ]
    _emit(args.out, stdout, ORACLE_COLUMNS, rows)
    violations = [cell for cell in cells if not cell.holds]
    for cell in violations:
        print(
            f"sandwich violated: n={cell.n} k={cell.k} eps0={cell.epsilon0!r} "
            f"eps={cell.epsilon!r}",
            file=sys.stderr,
        )
    return EXIT_PROPERTY_VIOLATION if violations else EXIT_OK


def _cmd_simulate(args: argparse.Namespace, stdout: TextIO) -> int:
    report = mse_experiment(
        args.n,
        args.dist,
        args.trials,
        args.eps,
        args.delta,
        args.seed,
        settings=SimulationSettings(max_workers=max(1, args.workers)),
    )
    row: tuple[CsvValue, ...] = (
        args.n,
        args.eps,
        args.delta,
        report.trials,
        report.empirical_mse,
        report.empirical_bias,
        report.theoretical_bound,
        report.seed,
    )
    write_csv(stdout, SIMULATE_COLUMNS, [row])
    return EXIT_OK


def _calibrate_row(
    method: AmplificationMethod,
    n: int,
    epsilon0: float | None,
    epsilon: float | None,
    delta: float,
    k: int | None,
    settings: BisectionSettings,
) -> SweepRow:
    if epsilon0 is not None:
        result = calibrate_epsilon(
            method, epsilon0=epsilon0, n=n, delta=delta, k=k, settings=settings
        )
        epsilon0_value, epsilon_value = epsilon0, result.value
    else:
        assert epsilon is not None
        budget = PrivacyBudget(epsilon=epsilon, delta=delta)
        result = calibrate_epsilon0(method, budget=budget, n=n, k=k, settings=settings)
        epsilon0_value, epsilon_value = result.value, epsilon
    return SweepRow(
        n=n,
        epsilon0=epsilon0_value,
        epsilon=epsilon_value,
        delta=delta,
        method=method.name,
        gamma=_mechanism_gamma(method, epsilon0_value, k),
        certified_by=result.certified_by,
    )


def _infeasible_row(
    method: AmplificationMethod,
    n: int,
    epsilon0: float | None,
    epsilon: float | None,
    delta: float,
    k: int | None,
) -> SweepRow:
    if epsilon0 is not None:
        return SweepRow(
            n=n,
            epsilon0=epsilon0,
            epsilon=math.inf,
            delta=delta,
            method=method.name,
            gamma=_mechanism_gamma(method, epsilon0, k),
            certified_by=CertifiedBy.INFEASIBLE,
        )
    return SweepRow(
        n=n,
        epsilon0=math.inf,
        epsilon=epsilon if epsilon is not None else math.inf,
        delta=delta,
        method=method.name,
        gamma=math.nan,
        certified_by=CertifiedBy.INFEASIBLE,
    )


def _mechanism_gamma(method: AmplificationMethod, epsilon0: float, k: int | None) -> float:
    if method.mechanism is MechanismFamily.KRR and k is not None:
        return krr_gamma(k, epsilon0)
    if method.mechanism is MechanismFamily.LAPLACE:
        return laplace_gamma(epsilon0)
    return gamma_lower_bound(epsilon0)


def _require_domain_size(method: AmplificationMethod, k: int | None) -> None:
    if method.needs_domain_size and k is None:
        raise ValueError(f"Method {method.name} needs --k.")


def _emit(
    out: Path | None,
    stdout: TextIO,
    columns: Sequence[str],
    rows: Sequence[Sequence[CsvValue]],
) -> None:
    if out is None:
        write_csv(stdout, columns, rows)
        return
    write_csv_file(out, columns, rows)


def _add_budget_arguments(parser: argparse.ArgumentParser) -> None:
    unknown = parser.add_mutually_exclusive_group(required=True)
    unknown.add_argument("--eps0", type=_parse_real, help="fix eps0 and solve for epsilon")
    unknown.add_argument("--eps", type=_parse_real, help="fix epsilon and solve for eps0")
    parser.add_argument("--delta", type=float, default=1e-6)
    parser.add_argument("--k", type=_parse_int, help="domain size for rr methods")
    parser.add_argument(
        "--no-clamp",
        action="store_true",
        help="report infeasibility instead of clamping epsilon to eps0",
    )


def _parse_int(text: str) -> int:
    """Integers, also written in scientific notation such as 1e5."""
    try:
        return int(text)
    except ValueError:
        value = float(text)
        if not value.is_integer():
            raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
        return int(value)


def _parse_real(text: str) -> float:
    """Reals, also written as ln<x> such as ln3."""
    stripped = text.strip()
    try:
        if stripped.startswith("ln"):
            return math.log(float(stripped[2:].strip("()")))
        return float(stripped)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a real number") from None


def _int_list(text: str) -> list[int]:
    values = [_parse_int(token) for token in text.split(",") if token.strip()]
    if not values:
        raise argparse.ArgumentTypeError("grid must not be empty")
    return values


def _real_list(text: str) -> list[float]:
    values = [_parse_real(token) for token in text.split(",") if token.strip()]
    if not values:
        raise argparse.ArgumentTypeError("grid must not be empty")
    return values


def _parse_methods(text: str) -> list[AmplificationMethod]:
    try:
        return [AmplificationMethod.from_name(token) for token in text.split(",") if token.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parse_distribution(text: str) -> InputGenerator:
    match = _CONSTANT_PATTERN.match(text)
    if match is not None:
        value = float(match.group("value") or 0.0)
        if not 0.0 <= value <= 1.0:
            raise argparse.ArgumentTypeError(f"constant input {value} is outside [0, 1]")
        return InputGenerator(InputDistribution.CONSTANT, value)
    try:
        return InputGenerator(InputDistribution(text))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown distribution {text!r}; expected constant<v>, grid, uniform or two-point"
        ) from None
