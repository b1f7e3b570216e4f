"""dicke CLI."""

import functools
import logging
import math
import os
from pathlib import Path
from typing import Optional

import click
import numpy as np

from dicke import __version__
from dicke.core.config import (
    BetaGrid,
    CanonicalSettings,
    DiagSettings,
    EnergyGrid,
    MicroSettings,
    RunConfig,
    default_cache_dir,
    load_config_file,
)
from dicke.core.errors import NoTransitionError
from dicke.core.model import ModelParams, SectorId
from dicke.core.storage import SpectrumStore
from dicke.core.utils import csv_text, format_table, key_value_block, write_csv
from dicke.diag import all_spectra, histogram_observables
from dicke.diag.histogram import HISTOGRAM_COLUMNS
from dicke.ensembles import EnsembleRegistry, ThermoCurve
from dicke.ensembles.laplace import critical_beta, laplace_sweep, write_states
from dicke.ensembles.thermo import CSV_COLUMNS as THERMO_COLUMNS
from dicke.scaling import (
    DEFAULT_LADDER,
    delta_e,
    delta_jz,
    find_precursor_jx,
    find_precursor_jz,
    fit_powerlaw,
    monotonicity_violations,
)
from dicke.semiclassics.integrals import JxWeight
from dicke.semiclassics.sector import (
    CSV_COLUMNS as SECTOR_COLUMNS,
)
from dicke.semiclassics.sector import (
    DERIVATIVE_COLUMNS,
    e_over_j_grid,
    panel_sectors,
    sector_curve,
)

logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
COMPARE_COLUMNS = [
    "E_per_N",
    "beta_micro",
    "beta_canonical",
    "jz_micro",
    "jz_canonical",
    "jx_micro_plus",
    "jx_laplace_eps",
]
SCALING_COLUMNS = ["n_atoms", "delta_e", "delta_jz"]
EQUIVALENCE_WINDOW = (-2.0, -0.1)


def configure_logging(debug: bool) -> None:
    """DEBUG when --debug or DICKE_DEBUG=true, INFO otherwise."""
    if debug or os.environ.get("DICKE_DEBUG", "false") == "true":
        logging.basicConfig(level=logging.DEBUG, force=True)
    else:
        logging.basicConfig(level=logging.INFO, force=True)


def handle_errors(func):
    """Report library errors as `Error: ...` with the documented exit codes."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except click.ClickException:
            raise
        except ArithmeticError as e:
            click.echo(f"Error: {e}", err=True)
            click.get_current_context().exit(EXIT_NUMERICAL)
        except (ValueError, OSError) as e:
            click.echo(f"Error: {e}", err=True)
            click.get_current_context().exit(EXIT_CONFIG)

    return wrapper


def model_options(require_lambda: bool = False, n_atoms: int = 100_000, epsilon: float = 0.0):
    """Options shared by every command that builds ModelParams."""
    options = [
        click.option("--omega", type=float, default=1.0, show_default=True, help="Photon frequency"),
        click.option("--omega0", type=float, default=1.0, show_default=True, help="Atomic splitting"),
        click.option(
            "--lambda",
            "lam",
            type=float,
            default=None if require_lambda else 1.5,
            show_default=not require_lambda,
            help="Coupling strength" + (" (required)" if require_lambda else ""),
        ),
        click.option("--n", "n_atoms", type=int, default=n_atoms, show_default=True, help="Number of atoms"),
        click.option(
            "--epsilon", type=float, default=epsilon, show_default=True, help="Symmetry-breaking field"
        ),
    ]

    def decorator(func):
        for option in reversed(options):
            func = option(func)
        return func

    return decorator


def output_option(func):
    return click.option(
        "--output", "-o", type=click.Path(dir_okay=False, path_type=Path), default=None,
        help="CSV output path (stdout if omitted)",
    )(func)


def threads_option(func):
    return click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker cap")(func)


def build_params(omega, omega0, lam, n_atoms, epsilon) -> ModelParams:
    return ModelParams(omega=omega, omega0=omega0, lam=lam, n_atoms=n_atoms, epsilon=epsilon)


def emit(columns: list[str], rows: list, output: Optional[Path]) -> None:
    if output is None:
        click.echo(csv_text(columns, rows), nl=False)
    else:
        write_csv(output, columns, rows)
        click.echo(f"wrote {output}")


def critical_block(params: ModelParams) -> str:
    try:
        return critical_beta(params).to_block()
    except NoTransitionError as e:
        return str(e).split(":")[0]


@click.group()
@click.version_option(version=__version__)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="key=value file with option defaults; flags override it",
)
@click.option("--debug", is_flag=True, help="Debug logging (also DICKE_DEBUG=true)")
@click.pass_context
def cli(ctx, config_path: Optional[Path], debug: bool):
    """dicke - thermodynamics of the Dicke model in both ensembles."""
    configure_logging(debug)
    if config_path is not None:
        try:
            values = load_config_file(config_path)
        except ValueError as e:
            click.echo(f"Error: {e}", err=True)
            ctx.exit(EXIT_CONFIG)
        ctx.default_map = {name: values for name in cli.commands}


@cli.command()
@model_options(require_lambda=True)
@click.option("--j-fraction", type=float, default=None, help="Sector j / N (default 1/2)")
@click.option("--j", "j_value", type=float, default=None, help="Sector j")
@click.option("--e-min", type=float, default=-2.0, show_default=True, help="Lowest E/N")
@click.option("--e-max", type=float, default=1.0, show_default=True, help="Highest E/N")
@click.option("--e-step", type=float, default=1e-3, show_default=True, help="E/N step")
@click.option("--with-derivatives", is_flag=True, help="Append drho_dE and djz_dE columns")
@click.option("--panel", is_flag=True, help="Write sectors j = kN/16, k = 2..8")
@click.option(
    "--quadrature", type=click.Choice(["gauss", "adaptive"]), default="gauss", show_default=True
)
@click.option(
    "--jx-weight", type=click.Choice([w.value for w in JxWeight]), default="verbatim",
    show_default=True,
)
@output_option
@handle_errors
def sector(
    omega, omega0, lam, n_atoms, epsilon, j_fraction, j_value, e_min, e_max, e_step,
    with_derivatives, panel, quadrature, jx_weight, output,
):
    """Semiclassical curve of one j-sector."""
    if lam is None:
        raise click.UsageError("Missing option '--lambda'.")
    if j_fraction is not None and j_value is not None:
        raise click.UsageError("--j-fraction and --j are mutually exclusive.")
    if panel and output is None:
        raise click.UsageError("--panel needs --output to derive file names.")
    config = RunConfig(
        command="sector",
        params=build_params(omega, omega0, lam, n_atoms, epsilon),
        energy_grid=EnergyGrid(e_min=e_min, e_max=e_max, e_step=e_step),
        output=output,
        micro=MicroSettings(sector_quadrature=quadrature, jx_weight=jx_weight),
    )
    params = config.params
    columns = SECTOR_COLUMNS + (DERIVATIVE_COLUMNS if with_derivatives else [])

    if panel:
        for k, sector_id in panel_sectors(params.n_atoms):
            curve = _sector_curve(config, sector_id)
            path = output.with_name(f"{output.stem}_j{k}of16{output.suffix or '.csv'}")
            curve.to_csv(path, derivatives=with_derivatives)
            click.echo(f"wrote {path}")
        return

    if j_value is not None:
        sector_id = SectorId.create(params.n_atoms, j_value)
    else:
        sector_id = SectorId.from_fraction(params.n_atoms, 0.5 if j_fraction is None else j_fraction)
    curve = _sector_curve(config, sector_id)
    emit(columns, curve.rows(with_derivatives), output)


def _sector_curve(config: RunConfig, sector_id: SectorId):
    grid = e_over_j_grid(config.energy_grid.values(), sector_id)
    return sector_curve(
        config.params,
        sector_id,
        grid,
        method=config.micro.sector_quadrature,
        order=config.micro.sector_order,
        jx_weight=config.micro.jx_weight,
    )


@cli.command()
@model_options()
@click.option("--e-min", type=float, default=-2.2, show_default=True, help="Lowest E/N")
@click.option("--e-max", type=float, default=0.5, show_default=True, help="Highest E/N")
@click.option("--e-step", type=float, default=5e-3, show_default=True, help="E/N step")
@click.option(
    "--mode", type=click.Choice(["full", "lowest-sector"]), default="full", show_default=True
)
@click.option("--x-panels", type=int, default=64, show_default=True, help="Graded x panels")
@click.option("--x-order", type=int, default=8, show_default=True, help="Nodes per x panel")
@click.option("--sector-order", type=int, default=64, show_default=True)
@click.option(
    "--quadrature", type=click.Choice(["gauss", "adaptive"]), default="gauss", show_default=True
)
@click.option(
    "--jx-weight", type=click.Choice([w.value for w in JxWeight]), default="verbatim",
    show_default=True,
)
@threads_option
@output_option
@handle_errors
def micro(
    omega, omega0, lam, n_atoms, epsilon, e_min, e_max, e_step, mode, x_panels, x_order,
    sector_order, quadrature, jx_weight, threads, output,
):
    """Full-model microcanonical curve on an E/N grid."""
    config = RunConfig(
        command="micro",
        params=build_params(omega, omega0, lam, n_atoms, epsilon),
        energy_grid=EnergyGrid(e_min=e_min, e_max=e_max, e_step=e_step),
        output=output,
        threads=threads,
        micro=MicroSettings(
            mode=mode,
            x_panels=x_panels,
            x_order=x_order,
            sector_order=sector_order,
            sector_quadrature=quadrature,
            jx_weight=jx_weight,
        ),
    )
    ensemble = EnsembleRegistry.get("micro")(config.params, config.micro, config.threads)
    curve = ensemble.curve(config.energy_grid.values())
    emit(THERMO_COLUMNS, curve.rows(), output)


def beta_options(beta_min: float = 0.01, beta_max: float = 10.0, beta_count: int = 200):
    options = [
        click.option("--beta-min", type=float, default=beta_min, show_default=True),
        click.option("--beta-max", type=float, default=beta_max, show_default=True),
        click.option("--beta-count", type=int, default=beta_count, show_default=True),
    ]

    def decorator(func):
        for option in reversed(options):
            func = option(func)
        return func

    return decorator


@cli.command()
@model_options()
@beta_options()
@click.option(
    "--sector", "sector_kind", type=click.Choice(["full", "jmax"]), default="full",
    show_default=True, help="Full model or the j = N/2 sector alone",
)
@click.option("--order", type=int, default=16, show_default=True, help="Nodes per panel")
@click.option("--panels", type=int, default=64, show_default=True, help="Panels per peak")
@threads_option
@output_option
@handle_errors
def canonical(
    omega, omega0, lam, n_atoms, epsilon, beta_min, beta_max, beta_count, sector_kind, order,
    panels, threads, output,
):
    """Finite-N canonical curve on a log-spaced beta grid."""
    config = RunConfig(
        command="canonical",
        params=build_params(omega, omega0, lam, n_atoms, epsilon),
        beta_grid=BetaGrid(beta_min=beta_min, beta_max=beta_max, beta_count=beta_count),
        output=output,
        threads=threads,
        canonical=CanonicalSettings(order=order, panels=panels),
    )
    ensemble = EnsembleRegistry.get("canonical")(
        config.params, config.canonical, config.threads, sector=sector_kind
    )
    curve = ensemble.curve(config.beta_grid.values())
    emit(THERMO_COLUMNS, curve.rows(), output)


@cli.command()
@model_options()
@beta_options()
@click.option(
    "--states", type=click.Path(dir_okay=False, path_type=Path), default=None,
    help="Also write the maximizer trajectory (beta, y0, psi, psi2, branch)",
)
@output_option
@handle_errors
def laplace(
    omega, omega0, lam, n_atoms, epsilon, beta_min, beta_max, beta_count, states, output
):
    """Thermodynamic-limit curve with the critical point."""
    config = RunConfig(
        command="laplace",
        params=build_params(omega, omega0, lam, n_atoms, epsilon),
        beta_grid=BetaGrid(beta_min=beta_min, beta_max=beta_max, beta_count=beta_count),
        output=output,
    )
    betas = config.beta_grid.values()
    curve = EnsembleRegistry.get("laplace")(config.params, config.canonical).curve(betas)
    emit(THERMO_COLUMNS, curve.rows(), output)
    if states is not None:
        write_states(laplace_sweep(config.params, betas), states)
        click.echo(f"wrote {states}")
    if output is not None:
        click.echo(critical_block(config.params))


def compare_table(micro_curve: ThermoCurve, laplace_curve: ThermoCurve) -> list[list[float]]:
    energies = micro_curve.e_per_atom
    beta_canonical = laplace_curve.interpolate("beta", energies)
    jz_canonical = laplace_curve.interpolate("jz_per_atom", energies)
    jx_laplace = laplace_curve.interpolate("jx_plus_per_atom", energies)
    return [
        list(row)
        for row in zip(
            energies,
            micro_curve.beta,
            beta_canonical,
            micro_curve.jz_per_atom,
            jz_canonical,
            micro_curve.jx_plus_per_atom,
            jx_laplace,
        )
    ]


def compare_summary(rows: list[list[float]]) -> dict:
    table = np.array(rows, dtype=float).reshape(len(rows), len(COMPARE_COLUMNS))
    e = table[:, 0]
    window = (e >= EQUIVALENCE_WINDOW[0]) & (e <= EQUIVALENCE_WINDOW[1])

    def max_dev(a, b, relative=False):
        mask = window & np.isfinite(a) & np.isfinite(b)
        if not mask.any():
            return math.nan
        dev = np.abs(a[mask] - b[mask])
        if relative:
            dev = dev / np.abs(b[mask])
        return float(dev.max())

    return {
        "max_rel_dev_beta": max_dev(table[:, 1], table[:, 2], relative=True),
        "max_abs_dev_jz": max_dev(table[:, 3], table[:, 4]),
        "max_abs_dev_jx": max_dev(table[:, 5], table[:, 6]),
    }


@cli.command()
@model_options()
@click.option("--e-min", type=float, default=-2.2, show_default=True, help="Lowest E/N")
@click.option("--e-max", type=float, default=0.5, show_default=True, help="Highest E/N")
@click.option("--e-step", type=float, default=5e-3, show_default=True, help="E/N step")
@beta_options(beta_min=0.005, beta_max=50.0, beta_count=600)
@click.option(
    "--micro-csv", type=click.Path(exists=True, dir_okay=False, path_type=Path), default=None,
    help="Reuse a curve written by `dicke micro` instead of recomputing it",
)
@threads_option
@output_option
@handle_errors
def compare(
    omega, omega0, lam, n_atoms, epsilon, e_min, e_max, e_step, beta_min, beta_max,
    beta_count, micro_csv, threads, output,
):
    """Microcanonical against thermodynamic-limit canonical results on one E/N grid."""
    config = RunConfig(
        command="compare",
        params=build_params(omega, omega0, lam, n_atoms, epsilon),
        energy_grid=EnergyGrid(e_min=e_min, e_max=e_max, e_step=e_step),
        beta_grid=BetaGrid(beta_min=beta_min, beta_max=beta_max, beta_count=beta_count),
        output=output,
        threads=threads,
    )
    if micro_csv is not None:
        micro_curve = ThermoCurve.from_csv(micro_csv, config.params.n_atoms)
        if micro_curve.ensemble != "micro":
            raise ValueError(f"{micro_csv}: expected a micro curve, got {micro_curve.ensemble}")
    else:
        micro_curve = EnsembleRegistry.get("micro")(
            config.params, config.micro, config.threads
        ).curve(config.energy_grid.values())
    laplace_curve = EnsembleRegistry.get("laplace")(config.params, config.canonical).curve(
        config.beta_grid.values()
    )
    rows = compare_table(micro_curve, laplace_curve)
    emit(COMPARE_COLUMNS, rows, output)
    # summary goes to stderr when stdout carries the table
    click.echo(key_value_block(compare_summary(rows)), err=output is None)
    click.echo(critical_block(config.params), err=output is None)


@cli.command()
@model_options(n_atoms=16, epsilon=1e-6)
@click.option("--n-max", type=int, default=150, show_default=True, help="Photon truncation")
@click.option("--bins", "bin_width", type=float, default=0.05, show_default=True, help="Bin width in E/N")
@click.option("--no-split", is_flag=True, help="Do not split Jx by sign")
@click.option("--e-min", type=float, default=None, help="Lowest E/N kept in the histogram")
@click.option("--e-max", type=float, default=None, help="Highest E/N kept in the histogram")
@click.option(
    "--cache-dir", type=click.Path(file_okay=False, path_type=Path), default=None,
    help="Spectrum cache (default DICKE_CACHE_DIR or ~/.cache/dicke)",
)
@click.option("--refresh", is_flag=True, help="Drop cached spectra and diagonalize again")
@threads_option
@output_option
@handle_errors
def diag(
    omega, omega0, lam, n_atoms, epsilon, n_max, bin_width, no_split, e_min, e_max,
    cache_dir, refresh, threads, output,
):
    """Exact diagonalization of every sector and the weighted histograms."""
    config = RunConfig(
        command="diag",
        params=build_params(omega, omega0, lam, n_atoms, epsilon),
        output=output,
        cache_dir=cache_dir or default_cache_dir(),
        threads=threads,
        diag=DiagSettings(n_max=n_max, bin_width=bin_width, threads=threads),
    )
    store = SpectrumStore(config.cache_dir)
    store.initialize()
    caches, cached = all_spectra(
        config.params, config.diag.n_max, store, config.threads, refresh=refresh
    )
    e_range = None
    if e_min is not None or e_max is not None:
        e_range = (-math.inf if e_min is None else e_min, math.inf if e_max is None else e_max)
    table = histogram_observables(
        caches,
        config.params.n_atoms,
        config.diag.bin_width,
        split_by_jx_sign=not no_split,
        parity_tolerance=config.diag.parity_tolerance,
        e_range=e_range,
    )
    emit(HISTOGRAM_COLUMNS, table.rows(), output)
    click.echo(f"cached: {'true' if cached else 'false'}", err=output is None)


@cli.command()
@model_options()
@click.option(
    "--observable", type=click.Choice(["jz", "jx", "jzc"]), default="jz", show_default=True,
    help="Precursor: Jz minimum energy, Jx threshold energy or Jz minimum value",
)
@click.option(
    "--ladder", type=str, default=",".join(str(n) for n in DEFAULT_LADDER), show_default=True,
    help="Comma-separated atom numbers",
)
@click.option("--threshold", type=float, default=0.01, show_default=True, help="Jx/N threshold")
@threads_option
@output_option
@handle_errors
def scaling(
    omega, omega0, lam, n_atoms, epsilon, observable, ladder, threshold, threads, output
):
    """Finite-size precursors over an N ladder and their power-law fit."""
    try:
        sizes = [int(float(n)) for n in ladder.split(",") if n.strip()]
    except ValueError:
        raise click.BadParameter(f"cannot parse ladder '{ladder}'", param_hint="--ladder")
    if len(sizes) < 3:
        raise click.BadParameter("the power-law fit needs at least three sizes", param_hint="--ladder")
    base = RunConfig(
        command="scaling",
        params=build_params(omega, omega0, lam, n_atoms, epsilon),
        output=output,
        threads=threads,
    )
    rows = []
    for size in sizes:
        params = base.params.replace(n_atoms=size)
        if observable == "jx":
            precursor = find_precursor_jx(
                params, threshold, settings=base.micro, threads=base.threads
            )
            rows.append([size, delta_e(precursor, params), math.nan])
        else:
            precursor = find_precursor_jz(params, settings=base.micro, threads=base.threads)
            rows.append([size, delta_e(precursor, params), delta_jz(precursor, params)])
        logger.info("N=%d precursor E/N=%.6g", size, precursor.e_per_atom)
    column = 2 if observable == "jzc" else 1
    points = [(row[0], row[column]) for row in rows]
    for size in monotonicity_violations(points):
        logger.warning("non-monotone precursor at N=%d, likely a grid artifact", size)
        click.echo(f"warning: non-monotone precursor at N={size} (grid artifact?)", err=True)
    fit = fit_powerlaw(points)
    emit(SCALING_COLUMNS, rows, output)
    if output is not None:
        click.echo(format_table(SCALING_COLUMNS, [dict(zip(SCALING_COLUMNS, r)) for r in rows]))
        click.echo(key_value_block(fit.summary()))


if __name__ == "__main__":
    cli()
