"""CLI entrypoint for groupspike."""

import csv
import dataclasses
import inspect
import json
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Tuple

import click
import numpy as np
import typer
from rich.table import Table
from typer.core import TyperArgument

from . import __version__
from .api import FitOptions, FitResult, fit
from .config import create_default_config, get_config_value, load_config, sampler_config_from
from .constants import (
    DEFAULT_CONFIG_FILE,
    EXIT_INPUT_ERROR,
    EXIT_NUMERICAL_ERROR,
    LEVEL_COEF,
    METHOD_BGL_SS,
    METHODS,
)
from .core import GroupedDesign, SamplerConfig, make_design, standardize
from .exceptions import (
    GroupSpikeError,
    InputError,
    MissingValue,
    NumericalError,
    ParseError,
)
from .export import (
    build_benchmark_data,
    build_coefficient_data,
    build_fit_data,
    build_sensitivity_data,
    dumps_json,
    export_benchmark_csv,
    export_coefficient_csv,
    export_design_csv,
    export_group_spec,
    export_json,
    export_replications_csv,
    export_sensitivity_csv,
    rows_for_console,
)
from .icons import icon_chain, icon_check, icon_table, icon_warning
from .logger import get_default_log_file, logger, setup_logger
from .parallel import resolve_workers
from .rand import RngStream
from .simulate import coefficient_table, generate_example, run_benchmark, run_sensitivity
from .utils import (
    console,
    format_seconds,
    print_error,
    print_info,
    print_success,
    print_warning,
    status_message,
    with_progress,
)
from .validators import (
    validate_boot_reps,
    validate_file_path,
    validate_group_sizes,
    validate_level,
    validate_log_level,
    validate_method,
    validate_methods,
    validate_positive,
    validate_probability,
    validate_reps,
)

_MISSING_TOKENS = {"", "na", "nan", "null", "none"}


def _patch_typer_click_metavar_compat() -> None:
    """Patch Typer/Click metavar incompatibilities in older Typer releases."""
    if getattr(click.core.Parameter.make_metavar, "__groupspike_compat__", False):
        return

    if not hasattr(TyperArgument, "deprecated"):
        TyperArgument.deprecated = False  # type: ignore[attr-defined]

    original_parameter_make_metavar = click.core.Parameter.make_metavar
    # Newer Click passes a context to make_metavar.
    _click_wants_ctx = len(inspect.signature(original_parameter_make_metavar).parameters) > 1

    def parameter_make_metavar(self, ctx=None):  # type: ignore[no-untyped-def]
        if _click_wants_ctx:
            if ctx is None:
                ctx = click.Context(click.Command(self.name or "groupspike"))
            return original_parameter_make_metavar(self, ctx)
        return original_parameter_make_metavar(self)

    parameter_make_metavar.__groupspike_compat__ = True  # type: ignore[attr-defined]
    click.core.Parameter.make_metavar = parameter_make_metavar

    original_argument_make_metavar = click.core.Argument.make_metavar
    _arg_wants_ctx = len(inspect.signature(original_argument_make_metavar).parameters) > 1

    def typer_argument_make_metavar(self, ctx=None):  # type: ignore[no-untyped-def]
        if _arg_wants_ctx:
            if ctx is None:
                ctx = click.Context(click.Command(self.name or "groupspike"))
            return original_argument_make_metavar(self, ctx)
        return original_argument_make_metavar(self)

    TyperArgument.make_metavar = typer_argument_make_metavar


_patch_typer_click_metavar_compat()

app = typer.Typer(
    name="groupspike",
    help=f"{icon_chain()} groupspike - Bayesian group and bi-level selection",
    add_completion=False,
)


@contextmanager
def _exit_on_error() -> Iterator[None]:
    """Map library errors to exit codes: 2 for input problems, 3 for numerical failures."""
    try:
        yield
    except InputError as e:
        print_error(str(e))
        logger.debug("Input error", exc_info=True)
        raise typer.Exit(EXIT_INPUT_ERROR) from e
    except NumericalError as e:
        print_error(str(e))
        logger.debug("Numerical failure", exc_info=True)
        raise typer.Exit(EXIT_NUMERICAL_ERROR) from e
    except GroupSpikeError as e:
        print_error(str(e))
        raise typer.Exit(EXIT_INPUT_ERROR) from e
    except OSError as e:
        print_error(f"Cannot access {e.filename or 'file'}: {e.strerror or e}")
        logger.debug("I/O error", exc_info=True)
        raise typer.Exit(EXIT_INPUT_ERROR) from e


def _parse_cell(text: str, row: int, column: int) -> float:
    token = text.strip()
    if token.lower() in _MISSING_TOKENS:
        raise MissingValue(
            f"Missing value at row {row}, column {column}",
            "Remove or impute incomplete rows before fitting",
            row=row,
            column=column,
        )
    try:
        return float(token)
    except ValueError:
        raise ParseError(
            f"Non-numeric value {token!r} at row {row}, column {column}",
            "Every cell after the header must be a number",
            row=row,
            column=column,
        ) from None


def load_group_spec(path: Path) -> List[int]:
    """
    Read a JSON array of group sizes.

    Raises:
        ParseError: If the file is not valid JSON
        ConfigurationError: If the array does not hold positive integers
    """
    try:
        sizes = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise ParseError(f"Cannot read group spec {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ParseError(
            f"Group spec {path} is not valid JSON: {e.msg}",
            "Write the group sizes as a JSON array, e.g. [5, 5, 5, 5]",
            row=e.lineno,
            column=e.colno,
        ) from e
    return validate_group_sizes(sizes)


def load_csv(path: Path, group_spec_path: Path) -> GroupedDesign:
    """
    Load a design from CSV plus a JSON group specification.

    The CSV has a header row, the response in a first column named ``y`` and
    the covariates in group order. Rows and columns in error messages are
    1-based file positions, so the first data row is row 2.

    Raises:
        ParseError: Malformed header, ragged rows or non-numeric cells
        MissingValue: Empty or NA cells
        DimensionMismatch: Group sizes that do not add up to the covariate count
    """
    try:
        with path.open(newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise ParseError(f"Cannot read data file {path}: {e}") from e
    except UnicodeDecodeError as e:
        raise ParseError(f"Data file {path} is not UTF-8 text") from e

    numbered = [(i + 1, r) for i, r in enumerate(rows) if r]
    if not numbered:
        raise ParseError(f"Data file {path} is empty", "Add a header row and data rows")
    header = [cell.strip() for cell in numbered[0][1]]
    if header[0].lower() != "y":
        raise ParseError(
            f"First column must be 'y', got {header[0]!r}",
            "Put the response in the first column and name it y",
            row=1,
            column=1,
        )
    if len(header) < 2:
        raise ParseError("Data file has no covariate columns", row=1)
    if len(numbered) < 2:
        raise ParseError(f"Data file {path} has a header but no data rows", row=2)

    width = len(header)
    values = np.empty((len(numbered) - 1, width))
    for i, (line, record) in enumerate(numbered[1:]):
        if len(record) != width:
            raise ParseError(
                f"Row {line} has {len(record)} cells, header has {width}",
                "Every row needs one value per header column",
                row=line,
            )
        for j, cell in enumerate(record):
            values[i, j] = _parse_cell(cell, line, j + 1)

    sizes = load_group_spec(group_spec_path)
    return make_design(values[:, 0], values[:, 1:], sizes)


def version_callback(value: bool):
    """Print version and exit."""
    if value:
        console.print(f"[bold blue]groupspike[/bold blue] version [cyan]{__version__}[/cyan]")
        raise typer.Exit()


@app.callback()
def main(
    ctx: typer.Context,
    version: Optional[bool] = typer.Option(
        None,
        "--version",
        "-v",
        callback=version_callback,
        is_eager=True,
        help="Show version and exit",
    ),
    log_file: Optional[Path] = typer.Option(
        None,
        "--log-file",
        help="Path to log file (default: ~/.groupspike/logs/groupspike.log)",
    ),
    log_level: Optional[str] = typer.Option(
        None,
        "--log-level",
        help="Logging level: DEBUG, INFO, WARNING, ERROR, CRITICAL",
    ),
    config_file: Optional[Path] = typer.Option(
        None,
        "--config",
        "-c",
        help="TOML config file (default: groupspike.toml, then .groupspikerc)",
    ),
):
    """groupspike - Gibbs samplers and penalised baselines for grouped regression."""
    with _exit_on_error():
        settings = load_config(config_file)
    ctx.obj = {"config": settings}

    try:
        validated_level = validate_log_level(
            log_level or get_config_value(settings, "logging", "level", default="INFO")
        )
    except Exception as exc:
        raise typer.BadParameter(str(exc), param_hint="--log-level") from exc

    configured_file = get_config_value(settings, "logging", "file")
    log_path = log_file or (Path(configured_file) if configured_file else None)
    if log_path is None:
        try:
            log_path = get_default_log_file()
        except OSError as exc:
            typer.echo(f"{icon_warning()} Logging to file disabled: {exc}", err=True)
    setup_logger(log_file=log_path, level=validated_level)


def _settings(ctx: typer.Context) -> Dict[str, Any]:
    if ctx.obj and "config" in ctx.obj:
        return ctx.obj["config"]
    return load_config()


def _sampler_config(
    ctx: typer.Context,
    iters: Optional[int],
    burn: Optional[int],
    seed: Optional[int],
    em_rounds: Optional[int],
) -> SamplerConfig:
    return sampler_config_from(
        _settings(ctx), n_iter=iters, n_burn=burn, seed=seed, em_rounds=em_rounds
    )


def _print_fit_summary(result: FitResult, design: GroupedDesign) -> None:
    table = Table(title=f"{icon_table()} {result.method} on n={design.n}, p={design.p}")
    table.add_column("Group", justify="right")
    table.add_column("Size", justify="right")
    table.add_column("||estimate||", justify="right")
    table.add_column("Selected")
    spike = None
    if result.draws is not None and result.draws.sparse:
        spike = result.draws.spike_frequency()
        table.add_column("P(zero)", justify="right")
    estimate = result.coefficients
    norms = estimate.group_norms()
    flags = result.selection.group_included if result.selection is not None else None
    for g, size in enumerate(design.group_sizes):
        cells = [
            str(g),
            str(size),
            f"{norms[g]:.4g}",
            "-" if flags is None else ("yes" if flags[g] else "no"),
        ]
        if spike is not None:
            cells.append(f"{spike[g]:.3f}")
        table.add_row(*cells)
    console.print(table)
    if result.draws is not None and result.draws.em is not None:
        em = result.draws.em
        state = "converged" if em.converged else "not converged"
        console.print(f"MC-EM {em.name} = {em.value:.4g} ({state} after {len(em.path) - 1} rounds)")
    console.print(f"Finished in {format_seconds(result.elapsed)}")


@app.command(name="fit")
def fit_cmd(
    ctx: typer.Context,
    data: Path = typer.Argument(..., help="CSV file with header; y first, then covariates"),
    groups: Path = typer.Option(..., "--groups", "-g", help="JSON array of group sizes"),
    method: str = typer.Option(
        METHOD_BGL_SS, "--method", "-m", help=f"One of: {', '.join(METHODS)}"
    ),
    iters: Optional[int] = typer.Option(None, "--iters", help="Gibbs iterations"),
    burn: Optional[int] = typer.Option(None, "--burn", help="Burn-in iterations"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed"),
    em_rounds: Optional[int] = typer.Option(None, "--em-rounds", help="MC-EM rounds (0 disables)"),
    fix_lambda: Optional[float] = typer.Option(
        None, "--fix-lambda", help="Fix the BGL-SS lambda instead of tuning it"
    ),
    pi0: Optional[float] = typer.Option(None, "--pi0", help="Fix the BGL-SS spike probability"),
    pi0_beta: Tuple[float, float] = typer.Option(
        (None, None), "--pi0-beta", help="Beta(A, B) prior on the BGL-SS pi0"
    ),
    folds: Optional[int] = typer.Option(None, "--folds", help="CV folds for gl and sgl"),
    output: str = typer.Option(
        "-", "--output", "-o", help="JSON report path, or '-' for standard output"
    ),
    standardize_columns: bool = typer.Option(
        True,
        "--standardize/--no-standardize",
        help="Centre y and scale covariates to unit variance before fitting",
    ),
):
    """Fit one method to a CSV dataset and write a JSON report."""
    settings = _settings(ctx)
    with _exit_on_error():
        method = validate_method(method)
        data = validate_file_path(data, must_exist=True, must_be_file=True)
        groups = validate_file_path(groups, must_exist=True, must_be_file=True)
        design = load_csv(data, groups)
        config = _sampler_config(ctx, iters, burn, seed, em_rounds)

        hyper = config.bgl_ss
        overrides: Dict[str, Any] = {}
        if fix_lambda is not None:
            overrides["lam"] = validate_positive(fix_lambda, "--fix-lambda")
        if pi0 is not None:
            overrides["pi0"] = validate_probability(pi0, "--pi0")
        if pi0_beta[0] is not None and pi0_beta[1] is not None:
            overrides["a"], overrides["b"] = pi0_beta
        if overrides:
            config = config.replace(bgl_ss=dataclasses.replace(hyper, **overrides))

        fit_design = design
        scaler = None
        if standardize_columns:
            fit_design, scaler = standardize(design)

        options = FitOptions(
            folds=folds or int(get_config_value(settings, "benchmark", "folds", default=5)),
            jobs=1,
        )
        logger.info(f"Fitting {method} to {data} (n={design.n}, p={design.p})")
        with status_message(f"[bold green]Fitting {method}...[/bold green]"):
            result = fit(fit_design, method, config, RngStream(config.seed), options)

        report = build_fit_data(result, fit_design, config)
        metadata = report.pop("metadata")
        if scaler is not None:
            report["standardization"] = {
                "x_mean": scaler.x_mean.tolist(),
                "x_scale": scaler.x_scale.tolist(),
                "y_mean": scaler.y_mean,
            }
            report["original_scale"] = {
                kind: scaler.unscale(result.estimate(kind).values).tolist()
                for kind in (("mean", "median") if result.is_bayesian else ("estimate",))
            }
        report["metadata"] = metadata

    _print_fit_summary(result, fit_design)
    if output == "-":
        typer.echo(dumps_json(report))
        return
    with _exit_on_error():
        export_json(report, Path(output))
    print_success(f"Report written to {output}")


@app.command()
def benchmark(
    ctx: typer.Context,
    example: Optional[List[int]] = typer.Option(
        None, "--example", "-e", help="Example number 1-5 (repeatable; default all)"
    ),
    methods: str = typer.Option(",".join(METHODS), "--methods", help="Comma-separated methods"),
    reps: Optional[int] = typer.Option(None, "--reps", help="Replications per example"),
    iters: Optional[int] = typer.Option(None, "--iters", help="Gibbs iterations"),
    burn: Optional[int] = typer.Option(None, "--burn", help="Burn-in iterations"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Master seed"),
    em_rounds: Optional[int] = typer.Option(None, "--em-rounds", help="MC-EM rounds"),
    jobs: Optional[int] = typer.Option(
        None, "--jobs", "-j", help="Concurrent replications (0 = all physical cores)"
    ),
    level: str = typer.Option(LEVEL_COEF, "--level", help="Selection level: group or coef"),
    sensitivity: bool = typer.Option(
        False, "--sensitivity", help="Also run the BGL-SS pi0 sensitivity sweep on Example 1"
    ),
    coef_table: bool = typer.Option(
        False, "--coef-table", help="Also write the posterior mean/median coefficient table"
    ),
    output_dir: Path = typer.Option(
        Path("groupspike-benchmark"), "--output-dir", "-o", help="Directory for report files"
    ),
):
    """Replicate the simulation examples and tabulate selection and prediction."""
    settings = _settings(ctx)
    with _exit_on_error():
        n_reps = validate_reps(
            reps if reps is not None else int(get_config_value(settings, "benchmark", "reps"))
        )
        method_list = validate_methods(methods)
        level = validate_level(level)
        config = _sampler_config(ctx, iters, burn, seed, em_rounds)
        boot_reps = validate_boot_reps(int(get_config_value(settings, "benchmark", "boot_reps")))
        workers = resolve_workers(
            jobs if jobs is not None else int(get_config_value(settings, "benchmark", "jobs"))
        )
        folds = int(get_config_value(settings, "benchmark", "folds", default=5))
        examples = list(example) if example else [1, 2, 3, 4, 5]
        options = FitOptions(folds=folds, jobs=1)

        logger.info(
            f"Benchmark: examples {examples}, methods {method_list}, {n_reps} reps, "
            f"{workers} workers"
        )
        with with_progress() as progress:
            task = progress.add_task("Replications", total=len(examples) * n_reps)
            report = run_benchmark(
                examples,
                method_list,
                n_reps,
                config=config,
                seed=config.seed,
                jobs=workers,
                level=level,
                boot_reps=boot_reps,
                options=options,
                on_done=lambda: progress.advance(task),
            )

        output_dir.mkdir(parents=True, exist_ok=True)
        export_json(build_benchmark_data(report), output_dir / "benchmark.json")
        export_benchmark_csv(report, output_dir / "benchmark.csv")
        export_replications_csv(report, output_dir / "replications.csv")

        if sensitivity:
            with with_progress() as progress:
                task = progress.add_task("Sensitivity", total=n_reps)
                sens = run_sensitivity(
                    n_reps,
                    config=config,
                    seed=config.seed,
                    jobs=workers,
                    options=options,
                    on_done=lambda: progress.advance(task),
                )
            export_json(build_sensitivity_data(sens), output_dir / "sensitivity.json")
            export_sensitivity_csv(sens, output_dir / "sensitivity.csv")

        if coef_table:
            table = coefficient_table(config=config, seed=config.seed)
            export_json(build_coefficient_data(table), output_dir / "coefficients.json")
            export_coefficient_csv(table, output_dir / "coefficients.csv")

    summary = Table(title=f"{icon_table()} Benchmark ({n_reps} reps, {level} level)")
    for column in ("Example", "Method", "Selector", "TPR", "FPR", "Median MSE (SE)", "OK/Total"):
        summary.add_column(column)
    for cells in rows_for_console(report):
        summary.add_row(*cells)
    console.print(summary)
    if report.failures:
        print_warning(f"{len(report.failures)} fits failed; see benchmark.json")
    if sensitivity:
        print_info(f"Sensitivity sweep over {len(sens.rows)} settings: sensitivity.json")
        if sens.failures:
            print_warning(f"{len(sens.failures)} sensitivity fits failed; see sensitivity.json")
    if coef_table:
        print_info("Posterior coefficient table: coefficients.json")
    print_success(f"Reports written to {output_dir}")


@app.command()
def simulate(
    example: int = typer.Option(..., "--example", "-e", help="Example number 1-5"),
    output: Path = typer.Option(..., "--output", "-o", help="CSV file for the training split"),
    groups: Path = typer.Option(..., "--groups", "-g", help="JSON file for the group sizes"),
    test_output: Optional[Path] = typer.Option(
        None, "--test-output", help="Optional CSV file for the test split"
    ),
    seed: int = typer.Option(0, "--seed", help="Random seed"),
    sigma: Optional[float] = typer.Option(None, "--sigma", help="Override the noise level"),
):
    """Write one simulated dataset in the format ``fit`` reads."""
    with _exit_on_error():
        if sigma is not None:
            validate_positive(sigma, "--sigma")
        data = generate_example(example, RngStream(seed, example), sigma=sigma)
        export_design_csv(data.train, output)
        export_group_spec(data.train.group_sizes, groups)
        if test_output is not None:
            export_design_csv(data.test, test_output)
    print_success(f"Example {example}: wrote {data.train.n} training rows to {output}")


@app.command(name="init-config")
def init_config(
    path: Path = typer.Argument(Path(DEFAULT_CONFIG_FILE), help="Where to write the config"),
    force: bool = typer.Option(False, "--force", "-f", help="Overwrite an existing file"),
):
    """Write a commented default configuration file."""
    if path.exists() and not force:
        print_error(f"{path} already exists; use --force to overwrite")
        raise typer.Exit(EXIT_INPUT_ERROR)
    create_default_config(path)
    console.print(f"[green]{icon_check()} Wrote default configuration to {path}[/green]")


def main_cli():
    """Entry point for CLI."""
    app()


if __name__ == "__main__":
    main_cli()
