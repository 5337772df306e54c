# -*- mode: python; coding: utf-8 -*-
#
# Copyright (C) 2025 Benjamin Thomas Schwertfeger
# All rights reserved.
# https://github.com/btschwertfeger
#

import sys
from logging import DEBUG, INFO, basicConfig, getLogger
from pathlib import Path
from typing import Any

from click import FLOAT, INT, STRING, Abort, ClickException, Context, UsageError, echo, pass_context
from click import Path as PathType
from cloup import Choice, Group, HelpFormatter, HelpTheme, Style, group, option, option_group
from cloup.constraints import RequireExactly, all_or_none
from pydantic import ValidationError

from smuce.exceptions import (
    ComputeBudgetError,
    DomainError,
    InfeasibleThresholdError,
    NoFeasibleFitError,
    NullTableError,
    SeriesFormatError,
    SmuceError,
)
from smuce.models.configuration import (
    FIT_FAMILIES,
    ChooseQConfigDTO,
    FitConfigDTO,
    NullConfigDTO,
    SimulateConfigDTO,
    SimulationConfigDTO,
)
from smuce.services.multiscale import PenaltyMode
from smuce.services.nulldist import DEFAULT_COMPUTE_BUDGET, DEFAULT_REPS

LOG = getLogger(__name__)

EXIT_IO = 1
EXIT_INFEASIBLE = 2
EXIT_ARGUMENTS = 3

OUTPUT_PATH = PathType(dir_okay=False, writable=True, path_type=Path)
INPUT_PATH = PathType(dir_okay=False, path_type=Path)


def exit_code(exc: BaseException) -> int:
    """Exit code of an exception escaping a command."""
    if isinstance(exc, InfeasibleThresholdError | NoFeasibleFitError):
        return EXIT_INFEASIBLE
    if isinstance(exc, SeriesFormatError | NullTableError | OSError | UnicodeError):
        return EXIT_IO
    if isinstance(exc, DomainError | ComputeBudgetError | ValidationError | UsageError):
        return EXIT_ARGUMENTS
    return EXIT_IO


class SmuceGroup(Group):
    """Command group mapping errors to the documented exit codes."""

    def main(  # type: ignore[override]
        self,
        args: Any = None,  # noqa: ANN401
        prog_name: str | None = None,
        complete_var: str | None = None,
        standalone_mode: bool = True,  # noqa: FBT001, FBT002
        **extra: Any,  # noqa: ANN401
    ) -> Any:  # noqa: ANN401
        try:
            result = super().main(args, prog_name, complete_var, standalone_mode=False, **extra)
        except ClickException as exc:
            exc.show()
            sys.exit(exit_code(exc))
        except Abort:
            echo("Aborted!", err=True)
            sys.exit(EXIT_IO)
        except (SmuceError, ValidationError, OSError, UnicodeError) as exc:
            echo(f"Error: {exc}", err=True)
            sys.exit(exit_code(exc))
        if not standalone_mode:
            return result
        sys.exit(result if isinstance(result, int) else 0)


def print_version(ctx: Context, param: Any, value: Any) -> None:  # noqa: ANN401, ARG001
    """Prints the version of the package"""
    if not value or ctx.resilient_parsing:
        return
    from smuce.core.engine import package_version  # noqa: PLC0415 # pylint: disable=import-outside-toplevel

    echo(package_version())
    ctx.exit()


def ensure_larger_than_zero(
    ctx: Context,
    param: Any,  # noqa: ANN401
    value: Any,  # noqa: ANN401
) -> Any:  # noqa: ANN401
    """Ensure the value is larger than 0"""
    if value is not None and value <= 0:
        ctx.fail(f"Value for option '{param.name}' must be larger than 0!")
    return value


def ensure_fraction(
    ctx: Context,
    param: Any,  # noqa: ANN401
    value: Any,  # noqa: ANN401
) -> Any:  # noqa: ANN401
    """Ensure the value lies in (0, 1)"""
    if value is not None and not 0 < value < 1:
        ctx.fail(f"Value for option '{param.name}' must lie between 0 and 1 (exclusive)!")
    return value


HELP_SETTINGS = HelpFormatter.settings(
    theme=HelpTheme(
        invoked_command=Style(fg="bright_yellow"),
        heading=Style(fg="bright_white", bold=True),
        constraint=Style(fg="magenta"),
        col1=Style(fg="bright_yellow"),
    ),
)

simulation_options = option_group(
    "Null Distribution Options",
    option(
        "--reps",
        type=INT,
        default=DEFAULT_REPS,
        show_default=True,
        callback=ensure_larger_than_zero,
        help="Number of Monte Carlo replicates of the null table.",
    ),
    option(
        "--seed",
        type=INT,
        default=0,
        show_default=True,
        help="Seed of the null table simulation.",
    ),
    option(
        "--threads",
        type=INT,
        callback=ensure_larger_than_zero,
        help="Worker threads of the simulation. Defaults to the number of logical cores.",
    ),
    option(
        "--cache-dir",
        type=PathType(file_okay=False, path_type=Path),
        envvar="SMUCE_CACHE_DIR",
        help="Directory of cached null tables (default: ~/.cache/smuce).",
    ),
    option(
        "--compute-budget",
        type=FLOAT,
        default=DEFAULT_COMPUTE_BUDGET,
        show_default=True,
        envvar="SMUCE_COMPUTE_BUDGET",
        callback=ensure_larger_than_zero,
        help="Upper bound on n² · reps interval evaluations of a simulation.",
    ),
    option(
        "--override-budget",
        is_flag=True,
        default=False,
        help="Simulate even if the compute budget is exceeded.",
    ),
)

statistic_options = option_group(
    "Multiscale Statistic Options",
    option(
        "--min-scale",
        type=FLOAT,
        help="Smallest interval length as a fraction of n. Defaults to 1/n.",
    ),
    option(
        "--mode",
        type=Choice([m.value for m in PenaltyMode]),
        default=PenaltyMode.SQRT.value,
        show_default=True,
        help="Scale calibration of the local statistics.",
    ),
)


def _simulation_config(kwargs: dict[str, Any]) -> SimulationConfigDTO:
    return SimulationConfigDTO(
        reps=kwargs.pop("reps"),
        seed=kwargs.pop("seed"),
        threads=kwargs.pop("threads"),
        cache_dir=kwargs.pop("cache_dir"),
        compute_budget=kwargs.pop("compute_budget"),
        override_budget=kwargs.pop("override_budget"),
    )


@group(
    cls=SmuceGroup,
    context_settings={
        "auto_envvar_prefix": "SMUCE",
        "help_option_names": ["-h", "--help"],
    },
    formatter_settings=HELP_SETTINGS,
    no_args_is_help=True,
)
@option(
    "--version",
    is_flag=True,
    callback=print_version,
    expose_value=False,
    is_eager=True,
)
@option(
    "-v",
    "--verbose",
    count=True,
    help="Increase the verbosity of output.",
)
@pass_context
def cli(ctx: Context, **kwargs: dict) -> None:
    """
    Multiscale change-point inference for exponential families.
    """
    ctx.ensure_object(dict)
    ctx.obj |= kwargs
    ctx.obj["verbosity"] = ctx.obj.pop("verbose", 0)

    basicConfig(
        format="%(asctime)s %(levelname)8s | %(message)s",
        datefmt="%Y/%m/%d %H:%M:%S",
        level=INFO if ctx.obj["verbosity"] == 0 else DEBUG,
    )


# ==============================================================================
# fit
##
@cli.command(formatter_settings=HELP_SETTINGS)
@option_group(
    "Input and Output",
    option("-i", "--input", "input_path", type=INPUT_PATH, required=True, help="CSV series, one value per line."),
    option("-o", "--output", "output_path", type=OUTPUT_PATH, help="JSON fit document (default: stdout)."),
    option("--null-table", type=INPUT_PATH, help="Null table file instead of the cache (with --alpha or --auto-q)."),
)
@option_group(
    "Family Options",
    option(
        "--family",
        type=Choice(FIT_FAMILIES),
        default="gauss-mean",
        show_default=True,
        help="Distribution of the observations; gauss-variance squares the data.",
    ),
    option("--sigma", type=FLOAT, callback=ensure_larger_than_zero, help="Known standard deviation, required for gauss-mean."),
    option("--quantile-level", type=FLOAT, callback=ensure_fraction, help="Level β of the quantile family."),
    option("--ma-beta", type=FLOAT, help="MA(1) coefficient of dependent Gaussian noise."),
)
@option_group(
    "Threshold",
    option("--alpha", type=FLOAT, callback=ensure_fraction, help="Significance level; q is the (1-α) null quantile."),
    option("--q", "q", type=FLOAT, help="Threshold of the multiscale constraint."),
    option("--auto-q", is_flag=True, default=False, help="Choose q balancing over- and underestimation."),
    constraint=RequireExactly(1),
)
@option_group(
    "Signal Prior (--auto-q)",
    option("--lambda-min", type=FLOAT, callback=ensure_fraction, help="Smallest segment length as a fraction of n."),
    option("--delta-min", type=FLOAT, callback=ensure_larger_than_zero, help="Smallest jump size."),
    constraint=all_or_none,
)
@statistic_options
@simulation_options
def fit(**kwargs: Any) -> None:
    """Estimate the step function, its jump intervals and confidence band."""
    from smuce.core.engine import SmuceEngine  # noqa: PLC0415

    config = FitConfigDTO(simulation=_simulation_config(kwargs), **kwargs)
    document = SmuceEngine().fit(config)
    if config.output_path is None:
        echo(document.to_json(), nl=False)


# ==============================================================================
# null
##
@cli.command(formatter_settings=HELP_SETTINGS)
@option_group(
    "Simulation Target",
    option("--n", "n", type=INT, required=True, help="Number of observations."),
    option("-o", "--output", "output_path", type=OUTPUT_PATH, help="Table file (default: the cache)."),
    option("--ma-beta", type=FLOAT, help="MA(1) coefficient of the Gaussian noise."),
    option("--family", type=Choice(FIT_FAMILIES[:-1]), help="Simulate exactly from this family."),
    option("--theta", type=FLOAT, help="Natural parameter of the exact simulation."),
    option("--sigma", type=FLOAT, callback=ensure_larger_than_zero, help="Standard deviation (gauss-mean)."),
)
@statistic_options
@simulation_options
def null(**kwargs: Any) -> None:
    """Simulate the null distribution of the multiscale statistic."""
    from smuce.core.engine import SmuceEngine  # noqa: PLC0415

    config = NullConfigDTO(simulation=_simulation_config(kwargs), **kwargs)
    table = SmuceEngine().null(config)
    LOG.info("Simulated %d samples for n=%d", table.reps, table.n)


# ==============================================================================
# choose-q
##
@cli.command(name="choose-q", formatter_settings=HELP_SETTINGS)
@option_group(
    "Threshold Choice",
    option("--n", "n", type=INT, required=True, help="Number of observations."),
    option("--null-table", type=INPUT_PATH, help="Null table file instead of the cache."),
    option("--curve", "curve_path", type=OUTPUT_PATH, help="Write q, alpha, beta and the objective as CSV."),
    option("--step", type=FLOAT, default=0.01, show_default=True, help="Grid step of the threshold scan."),
)
@option_group(
    "Signal Prior",
    option("--lambda-min", type=FLOAT, callback=ensure_fraction, help="Smallest segment length as a fraction of n."),
    option("--delta-min", type=FLOAT, callback=ensure_larger_than_zero, help="Smallest jump size."),
    constraint=all_or_none,
)
@statistic_options
@simulation_options
def choose_q(**kwargs: Any) -> None:
    """Choose q maximising 1 - α(q) - β(q)."""
    from smuce.core.engine import SmuceEngine  # noqa: PLC0415

    config = ChooseQConfigDTO(simulation=_simulation_config(kwargs), **kwargs)
    choice, _ = SmuceEngine().choose_q(config)
    echo(choice.model_dump_json(indent=2))


# ==============================================================================
# band-csv
##
@cli.command(name="band-csv", formatter_settings=HELP_SETTINGS)
@option("--fit", "document_path", type=INPUT_PATH, required=True, help="JSON fit document.")
@option("-o", "--output", "output_path", type=OUTPUT_PATH, required=True, help="CSV file to write.")
@option("-i", "--input", "input_path", type=INPUT_PATH, help="Series of the fit (default: the path in the document).")
def band_csv(document_path: Path, output_path: Path, input_path: Path | None) -> None:
    """Write data, fit and confidence band as a plot ready CSV."""
    from smuce.core.engine import SmuceEngine  # noqa: PLC0415

    rows = SmuceEngine().band_csv(document_path, output_path, input_path)
    LOG.info("Wrote %d rows to %s", rows, output_path)


# ==============================================================================
# simulate
##
@cli.command(formatter_settings=HELP_SETTINGS)
@option("--scenario", type=STRING, required=True, help="Name of a built-in scenario.")
@option("--reps", type=INT, callback=ensure_larger_than_zero, help="Replicates (default: the scenario's).")
@option("--seed", type=INT, default=0, show_default=True, help="Seed of the replicates.")
@option("-o", "--out", "output_path", type=OUTPUT_PATH, help="JSON report (default: stdout).")
@option("--threads", type=INT, callback=ensure_larger_than_zero, help="Worker threads.")
@option("--cache-dir", type=PathType(file_okay=False, path_type=Path), envvar="SMUCE_CACHE_DIR")
def simulate(**kwargs: Any) -> None:
    """Run a simulation scenario and report its summary statistics."""
    from smuce.core.engine import SmuceEngine  # noqa: PLC0415

    config = SimulateConfigDTO(**kwargs)
    report = SmuceEngine().simulate(config)
    if config.output_path is None:
        echo(report.model_dump_json(indent=2))
