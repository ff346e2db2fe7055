"""Command-line interface.

    bhchaos spectrum     build/cache spectra, density of states + summary
    bhchaos spacing      spacing histograms and gap-ratio reports
    bhchaos survival     random-state ensembles vs the analytic prediction
    bhchaos window-sweep equal-count energy windows sliding to the border
    bhchaos oracle       block spectra vs full-space diagonalization

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 cache corruption.  The spectrum cache root comes from $BHCHAOS_CACHE
(default ~/.cache/bhchaos) or the --cache option.
"""

from __future__ import annotations

import sys

import click

from . import __version__, pipelines
from .errors import CacheError, ConfigError, NumericalError

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CACHE = 4


def _parse_u(_ctx, _param, value: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in value.split(",") if tok.strip())
    except ValueError:
        raise click.BadParameter(f"could not parse coupling list {value!r}")


def _parse_center(_ctx, _param, value):
    if value is None or value == "auto":
        return value
    try:
        return float(value)
    except ValueError:
        raise click.BadParameter(f"center must be a number or 'auto', got {value!r}")


def common_options(f):
    f = click.option("--L", "-L", "L", type=int, default=9, show_default=True,
                     help="number of lattice sites")(f)
    f = click.option("--N", "-N", "N", type=int, default=9, show_default=True,
                     help="number of bosons")(f)
    f = click.option("--u", "u_values", default="0.5", callback=_parse_u, show_default=True,
                     help="coupling u in [0,1]; comma list runs one job per value")(f)
    f = click.option("--seed", type=int, default=0, show_default=True,
                     help="ensemble seed (bit-reproducible outputs)")(f)
    f = click.option("--threads", type=int, default=1, show_default=True,
                     help="worker threads for block diagonalization")(f)
    f = click.option("--out", type=click.Path(), default="bhchaos-out", show_default=True,
                     help="output directory")(f)
    f = click.option("--cache", "cache_dir", type=click.Path(), default=None,
                     help="spectrum cache root (overrides $BHCHAOS_CACHE)")(f)
    f = click.option("--preset", default=None,
                     help="named experiment preset (fig2..fig7); physics flags "
                          "are taken from the preset, operational flags still apply")(f)
    f = click.option("--plots/--no-plots", default=True, show_default=True,
                     help="render figures next to the CSV output")(f)
    return f


def window_options(f):
    f = click.option("--sigma", type=float, default=2.0, show_default=True,
                     help="window half-width")(f)
    f = click.option("--center", callback=_parse_center, default="auto", show_default=True,
                     help="window center energy, or 'auto' for the fitted peak")(f)
    f = click.option("--blocks", default="1", show_default=True,
                     help="block selection: keys like '1' or '9-even' (comma list), "
                          "'all', or 'one-per-group'")(f)
    return f


def _run(cfg: pipelines.RunConfig, runner) -> None:
    try:
        pipelines.apply_preset(cfg)
        runner(cfg)
    except ConfigError as exc:
        click.echo(f"configuration error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    except CacheError as exc:
        click.echo(f"cache error: {exc}", err=True)
        sys.exit(EXIT_CACHE)
    except NumericalError as exc:
        click.echo(f"numerical failure: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)


@click.group()
@click.version_option(__version__)
def main():
    """Bose-Hubbard quantum-chaos pipelines: spectra, statistics, survival."""


@main.command()
@common_options
@click.option("--bins", "dos_bins", type=int, default=60, show_default=True,
              help="histogram bins for the density of states")
@click.option("--oracle", is_flag=True, default=False,
              help="also compare block spectra against the full-space matrix")
def spectrum(L, N, u_values, seed, threads, out, cache_dir, preset, plots, dos_bins, oracle):
    """Diagonalize all symmetry blocks and report the density of states."""
    cfg = pipelines.RunConfig(
        command="spectrum", L=L, N=N, u_values=u_values, seed=seed, threads=threads,
        out=out, cache_dir=cache_dir, preset=preset, plots=plots, dos_bins=dos_bins,
        oracle=oracle,
    )
    _run(cfg, pipelines.run_spectrum)


@main.command()
@common_options
@window_options
@click.option("--keep-fraction", type=float, default=0.8, show_default=True,
              help="central fraction of each block spectrum when no window is used")
@click.option("--central-fraction", "use_fraction", is_flag=True, default=False,
              help="ignore the energy window and use the central fraction instead")
def spacing(L, N, u_values, seed, threads, out, cache_dir, preset, plots,
            sigma, center, blocks, keep_fraction, use_fraction):
    """Nearest-neighbor spacing and gap-ratio statistics, per block and pooled."""
    cfg = pipelines.RunConfig(
        command="spacing", L=L, N=N, u_values=u_values, seed=seed, threads=threads,
        out=out, cache_dir=cache_dir, preset=preset, plots=plots, sigma=sigma,
        center=None if use_fraction else center,
        blocks=tuple(blocks.split(";")), keep_fraction=keep_fraction,
    )
    _run(cfg, pipelines.run_spacing)


@main.command()
@common_options
@window_options
@click.option("--members", type=int, default=None,
              help="ensemble size (default: number of in-window levels)")
@click.option("--points", "time_points", type=int, default=600, show_default=True,
              help="points of the logarithmic time grid")
def survival(L, N, u_values, seed, threads, out, cache_dir, preset, plots,
             sigma, center, blocks, members, time_points):
    """Ensemble-averaged survival probability with the analytic overlay."""
    cfg = pipelines.RunConfig(
        command="survival", L=L, N=N, u_values=u_values, seed=seed, threads=threads,
        out=out, cache_dir=cache_dir, preset=preset, plots=plots, sigma=sigma,
        center=center, blocks=tuple(blocks.split(";")), members=members,
        time_points=time_points,
    )
    _run(cfg, pipelines.run_survival)


@main.command("window-sweep")
@common_options
@window_options
@click.option("--window-levels", type=int, default=600, show_default=True,
              help="levels per window")
@click.option("--windows", "n_windows", type=int, default=3, show_default=True,
              help="number of windows from the center to the border")
@click.option("--members", type=int, default=None,
              help="ensemble size (default: levels per window)")
@click.option("--points", "time_points", type=int, default=600, show_default=True,
              help="points of the logarithmic time grid")
def window_sweep(L, N, u_values, seed, threads, out, cache_dir, preset, plots,
                 sigma, center, blocks, window_levels, n_windows, members, time_points):
    """Survival ensembles in equal-count windows sliding toward the border."""
    cfg = pipelines.RunConfig(
        command="window-sweep", L=L, N=N, u_values=u_values, seed=seed, threads=threads,
        out=out, cache_dir=cache_dir, preset=preset, plots=plots, sigma=sigma,
        center=center, blocks=tuple(blocks.split(";")), window_levels=window_levels,
        n_windows=n_windows, members=members, time_points=time_points,
    )
    _run(cfg, pipelines.run_window_sweep)


@main.command()
@common_options
@click.option("--tolerance", "oracle_tolerance", type=float, default=1e-10, show_default=True,
              help="maximum allowed block-vs-full eigenvalue difference")
def oracle(L, N, u_values, seed, threads, out, cache_dir, preset, plots, oracle_tolerance):
    """Cross-check block spectra against a full-space diagonalization."""
    cfg = pipelines.RunConfig(
        command="oracle", L=L, N=N, u_values=u_values, seed=seed, threads=threads,
        out=out, cache_dir=cache_dir, preset=preset, plots=plots,
        oracle_tolerance=oracle_tolerance,
    )
    def runner(c):
        report = pipelines.run_oracle(c)
        click.echo(
            f"D={report['dimension']}  max|block-full|={report['max_abs_difference']:.3e}  "
            f"agrees={report['agrees']}"
        )
    _run(cfg, runner)


if __name__ == "__main__":
    main()
