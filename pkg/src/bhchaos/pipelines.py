"""Experiment pipelines behind the CLI: cached spectra in, report files out.

Each pipeline writes CSV data files plus a JSON report into a run directory
and renders matplotlib figures alongside (opt-out per config).  CSV bodies
are deterministic for a fixed seed: floats are serialized with shortest
round-trip repr and no volatile metadata enters the delimited files.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import rmt
from .cache import load_or_compute
from .curves import SurvivalCurve, log_bin
from .errors import ConfigError, NumericalError
from .hamiltonian import ModelParams, build_block_matrix, build_full_sparse
from .basis import enumerate_basis
from .spectra import (
    DosResult,
    SpectrumSet,
    density_of_states,
    resolve_selection,
    selection_levels,
)
from .statistics import central_fraction, spacing_statistics, unfold
from .survival import (
    EnergyWindow,
    late_time_average,
    ensemble_survival,
    sample_ensemble,
    select_levels,
    survey_time_grid,
    sweep_windows,
)

# Binning used for deviation metrics: coarser than the display binning so each
# bin averages enough samples of the non-self-averaging fluctuations.
METRIC_BINS_PER_DECADE = 10
from .symmetry import build_blocks

PRESETS: dict[str, dict] = {
    # DoS and single-sector spacing at the chaotic working point
    "fig2": {"command": "spacing", "L": 9, "N": 9, "u_values": (0.5,), "blocks": ("1",),
             "center": None, "keep_fraction": 0.8},
    # pooled spacing inside the central window: mixed sectors look Poisson,
    # adding exact degeneracies piles weight into the first bin
    "fig3": {"command": "spacing", "L": 9, "N": 9, "u_values": (0.5,),
             "blocks": ("one-per-group", "all"), "center": "auto", "sigma": 2.0},
    # correlation hole for one momentum sector and one parity sector
    "fig4": {"command": "survival", "L": 9, "N": 9, "u_values": (0.5,),
             "blocks": ("1", "9-even"), "center": "auto", "sigma": 2.0},
    # three equal-count windows sliding toward the spectrum border
    "fig5": {"command": "window-sweep", "L": 9, "N": 9, "u_values": (0.5,),
             "blocks": ("1",), "window_levels": 600, "n_windows": 3},
    # coupling sweep toward the integrable limit, single sector
    "fig6": {"command": "survival", "L": 9, "N": 9, "u_values": (0.3, 0.2, 0.15, 0.1),
             "blocks": ("1",), "center": "auto", "sigma": 2.0},
    # full-space ensembles: the hole survives mixing all sectors
    "fig7": {"command": "survival", "L": 9, "N": 9, "u_values": (0.5, 0.3, 0.1),
             "blocks": ("all",), "center": "auto", "sigma": 2.0},
}


@dataclass
class RunConfig:
    """Validated, serializable description of one CLI invocation."""

    command: str
    L: int = 9
    N: int = 9
    u_values: tuple[float, ...] = (0.5,)
    sigma: float = 2.0
    center: float | str | None = "auto"  # "auto", explicit value, or None (central fraction)
    blocks: tuple[str, ...] = ("1",)
    members: int | None = None
    seed: int = 0
    threads: int = 1
    out: str = "bhchaos-out"
    preset: str | None = None
    time_points: int = 600
    hole_points: int = 2000
    late_points: int = 1000
    dos_bins: int = 60
    keep_fraction: float = 0.8
    window_levels: int = 600
    n_windows: int = 3
    bins_per_decade: int = 20
    plots: bool = True
    cache_dir: str | None = None
    oracle: bool = False
    oracle_tolerance: float = 1e-10

    def validate(self) -> None:
        for u in self.u_values:
            if not 0.0 <= u <= 1.0:
                raise ConfigError(f"coupling u must lie in [0, 1], got {u}")
        if not self.u_values:
            raise ConfigError("need at least one coupling value")
        if self.sigma <= 0:
            raise ConfigError(f"window half-width must be positive, got {self.sigma}")
        if isinstance(self.center, str) and self.center != "auto":
            raise ConfigError(f"center must be a number or 'auto', got {self.center!r}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.threads < 1:
            raise ConfigError(f"threads must be at least 1, got {self.threads}")
        if self.time_points < 10:
            raise ConfigError(f"need at least 10 time points, got {self.time_points}")
        if self.dos_bins < 2:
            raise ConfigError(f"need at least 2 bins, got {self.dos_bins}")
        if not 0.0 < self.keep_fraction <= 1.0:
            raise ConfigError(f"keep_fraction must be in (0, 1], got {self.keep_fraction}")
        if self.members is not None and self.members < 1:
            raise ConfigError(f"members must be positive, got {self.members}")
        # ModelParams re-validates L, N
        ModelParams(L=self.L, N=self.N, u=self.u_values[0])

    def to_json(self) -> str:
        data = asdict(self)
        data["u_values"] = list(self.u_values)
        data["blocks"] = list(self.blocks)
        return json.dumps(data, indent=2, sort_keys=True)


def apply_preset(cfg: RunConfig) -> RunConfig:
    """Fill physics fields from a named preset; operational flags stay."""
    if cfg.preset is None:
        return cfg
    if cfg.preset not in PRESETS:
        raise ConfigError(f"unknown preset {cfg.preset!r}; available: {sorted(PRESETS)}")
    preset = PRESETS[cfg.preset]
    if preset["command"] != cfg.command:
        raise ConfigError(
            f"preset {cfg.preset!r} belongs to the {preset['command']!r} command"
        )
    for key, value in preset.items():
        if key != "command":
            setattr(cfg, key, value)
    return cfg


# ---------------------------------------------------------------------------
# small IO helpers

def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, header: list[str], columns: list[np.ndarray]) -> None:
    lengths = {len(c) for c in columns}
    if len(lengths) != 1:
        raise ValueError("columns have mismatched lengths")
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(_fmt(x) for x in row))
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, data: dict) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _prepare_out(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "run_config.json").write_text(cfg.to_json() + "\n")
    return out


def _spectra_for(cfg: RunConfig, u: float) -> tuple[SpectrumSet, bool]:
    params = ModelParams(L=cfg.L, N=cfg.N, u=u)
    root = Path(cfg.cache_dir) if cfg.cache_dir else None
    return load_or_compute(params, threads=cfg.threads, root=root)


def _selection_label(selection: str) -> str:
    token = selection.strip().lower()
    if token in ("all", "one-per-group", "one-per-degeneracy-group"):
        return token.replace("one-per-degeneracy-group", "one-per-group")
    parts = [p.strip() for p in token.split(",")]
    return "+".join(p if "-" in p else f"j{p}" for p in parts)


def _parse_selection(selection: str):
    token = selection.strip().lower()
    if token in ("all", "one-per-group", "one-per-degeneracy-group"):
        return token
    return [p.strip() for p in token.split(",") if p.strip()]


def _window_for(cfg: RunConfig, dos_fit) -> EnergyWindow:
    center = dos_fit.mean if cfg.center == "auto" else float(cfg.center)
    return EnergyWindow(center=center, half_width=cfg.sigma)


# ---------------------------------------------------------------------------
# spectrum

def run_spectrum(cfg: RunConfig) -> dict:
    cfg.validate()
    out = _prepare_out(cfg)
    results = {}
    for u in cfg.u_values:
        rundir = out / f"u{u:g}"
        rundir.mkdir(parents=True, exist_ok=True)
        spectra, hit = _spectra_for(cfg, u)
        dos = density_of_states(spectra, bins=cfg.dos_bins, selection="all")
        hist = dos.histogram
        write_csv(
            rundir / "dos.csv",
            ["bin_lo", "bin_hi", "count", "density", "gaussian_fit"],
            [hist.edges[:-1], hist.edges[1:], hist.counts,
             hist.density, dos.fit(hist.centers)],
        )
        summary = {
            "L": cfg.L,
            "N": cfg.N,
            "u": u,
            "dimension": spectra.total_levels,
            "blocks": [{"key": b.key, "dim": b.dim} for b in spectra.blocks],
            "degeneracy_groups": [
                [spectra.blocks[i].key for i in g] for g in spectra.degeneracy.groups
            ],
            "gaussian_fit": {
                "amplitude": dos.fit.amplitude, "mean": dos.fit.mean, "std": dos.fit.std,
            },
            "cache_hit": hit,
        }
        if cfg.oracle:
            summary["oracle"] = _oracle_report(ModelParams(cfg.L, cfg.N, u), cfg.oracle_tolerance)
        write_json(rundir / "summary.json", summary)
        if cfg.plots:
            from .plotting import plot_dos

            plot_dos(dos, rundir / "dos.png", title=f"L={cfg.L} N={cfg.N} u={u:g}")
        results[u] = summary
    return results


# ---------------------------------------------------------------------------
# oracle

def _oracle_report(params: ModelParams, tolerance: float) -> dict:
    basis = enumerate_basis(params.L, params.N)
    blocks, _, table = build_blocks(basis)
    union = np.sort(
        np.concatenate(
            [
                np.linalg.eigvalsh(build_block_matrix(params, basis, table, b).entries)
                if b.dim
                else np.empty(0)
                for b in blocks
            ]
        )
    )
    full = np.linalg.eigvalsh(build_full_sparse(params, basis).toarray())
    err = float(np.abs(union - full).max())
    return {
        "dimension": basis.dim,
        "max_abs_difference": err,
        "tolerance": tolerance,
        "agrees": bool(err <= tolerance),
    }


def run_oracle(cfg: RunConfig) -> dict:
    cfg.validate()
    out = _prepare_out(cfg)
    report = _oracle_report(ModelParams(cfg.L, cfg.N, cfg.u_values[0]), cfg.oracle_tolerance)
    write_json(out / "oracle.json", report)
    if not report["agrees"]:
        raise NumericalError(
            f"block spectra deviate from the full-space oracle by {report['max_abs_difference']:.3e}"
        )
    return report


# ---------------------------------------------------------------------------
# spacing

def _restricted_levels(
    spectra: SpectrumSet, selection, window: EnergyWindow | None, keep_fraction: float
) -> np.ndarray:
    """Pooled levels of a selection, cut by window or by central fraction."""
    indices = resolve_selection(spectra, selection)
    if window is None:
        parts = [
            central_fraction(spectra.blocks[i].eigenvalues, keep_fraction) for i in indices
        ]
    else:
        parts = [
            spectra.blocks[i].eigenvalues[window.contains(spectra.blocks[i].eigenvalues)]
            for i in indices
        ]
    return np.sort(np.concatenate(parts))


def _spacing_entry(levels: np.ndarray, label: str, rundir: Path, cfg: RunConfig) -> dict:
    unfolded = unfold(levels)
    hist = spacing_statistics(unfolded, mode="spacing")
    raw_ratio = spacing_statistics(levels, mode="gap-ratio")
    write_csv(
        rundir / f"spacing-{label}.csv",
        ["bin_lo", "bin_hi", "density", "wigner_ref", "poisson_ref"],
        [hist.edges[:-1], hist.edges[1:], hist.density, hist.wigner_ref, hist.poisson_ref],
    )
    first_ratio = float(hist.density[0] / hist.poisson_ref[0])
    entry = {
        "levels": int(len(levels)),
        "mean_gap_ratio": raw_ratio.r_mean,
        "chi2_wigner": hist.chi_square("wigner"),
        "chi2_poisson": hist.chi_square("poisson"),
        "first_bin_density": float(hist.density[0]),
        "first_bin_over_poisson": first_ratio,
        "zero_spacing_peak": bool(first_ratio >= 3.0),
    }
    if cfg.plots:
        from .plotting import plot_spacing

        plot_spacing(hist, rundir / f"spacing-{label}.png", title=label)
    return entry


def run_spacing(cfg: RunConfig) -> dict:
    cfg.validate()
    out = _prepare_out(cfg)
    results = {}
    for u in cfg.u_values:
        rundir = out / f"u{u:g}"
        rundir.mkdir(parents=True, exist_ok=True)
        spectra, _ = _spectra_for(cfg, u)
        report: dict = {"u": u, "selections": {}}
        for selection in cfg.blocks:
            sel = _parse_selection(selection)
            label = _selection_label(selection)
            window = None
            if cfg.center is not None:
                dos_fit = density_of_states(spectra, bins=cfg.dos_bins, selection=sel).fit
                window = _window_for(cfg, dos_fit)
            indices = resolve_selection(spectra, sel)
            entry: dict = {"window": None if window is None else
                           {"center": window.center, "half_width": window.half_width},
                           "keep_fraction": None if window is not None else cfg.keep_fraction,
                           "blocks": {}}
            for i in indices:
                key = spectra.blocks[i].key
                levels = _restricted_levels(spectra, [key], window, cfg.keep_fraction)
                entry["blocks"][key] = _spacing_entry(levels, f"{label}-b{key}", rundir, cfg)
            if len(indices) > 1:
                pooled = _restricted_levels(spectra, sel, window, cfg.keep_fraction)
                entry["pooled"] = _spacing_entry(pooled, f"{label}-pooled", rundir, cfg)
            report["selections"][label] = entry
        write_json(rundir / "spacing_report.json", report)
        results[u] = report
    return results


# ---------------------------------------------------------------------------
# survival

def run_survival_single(
    cfg: RunConfig, spectra: SpectrumSet, selection, rundir: Path,
    window: EnergyWindow | None = None,
) -> dict:
    """One ensemble run: numeric mean, analytic overlay, parameter report."""
    rundir.mkdir(parents=True, exist_ok=True)
    sel = _parse_selection(selection) if isinstance(selection, str) else selection
    dos = density_of_states(spectra, bins=cfg.dos_bins, selection=sel).fit
    if window is None:
        window = _window_for(cfg, dos)
    table = select_levels(spectra, sel, window)
    seq_spec = table.sequence_spec()
    eta = rmt.effective_dimension(window, dos)
    t_grid = survey_time_grid(
        window, table.nu_bar, table.dominant_density(),
        points=cfg.time_points, hole_points=cfg.hole_points, late_points=cfg.late_points,
    )

    ens = sample_ensemble(table, dos, members=cfg.members, seed=cfg.seed)
    res = ensemble_survival(ens, t_grid)
    analytic = rmt.analytic_survival(seq_spec, window, eta, t_grid)
    binned = log_bin(res.mean, cfg.bins_per_decade)
    binned_analytic = log_bin(analytic, cfg.bins_per_decade)

    hole_range = rmt.hole_time_range(table.dominant_density())
    deviation = rmt.hole_deviation(res.mean, analytic, hole_range, METRIC_BINS_PER_DECADE)
    s_inf = rmt.ensemble_asymptote(seq_spec, eta)
    late_mean = late_time_average(res.mean, table.nu_bar)

    write_csv(
        rundir / "survival.csv",
        ["t", "sp_mean", "sp_analytic", "sp_member_lo", "sp_member_hi"],
        [t_grid, res.mean.values, analytic.values, res.member_lo, res.member_hi],
    )
    write_csv(
        rundir / "survival-logbin.csv",
        ["t", "sp_mean", "sp_analytic"],
        [binned.times, binned.values, binned_analytic.values],
    )
    params = {
        "window": {"center": window.center, "half_width": window.half_width},
        "members": ens.members,
        "seed": cfg.seed,
        "eta": eta,
        "eta_level_count": rmt.effective_dimension_mean_dos(window, table.nu_bar),
        "nu_bar": table.nu_bar,
        "sp_infinity_analytic": s_inf,
        "sp_infinity_numeric": late_mean,
        "mean_member_asymptote": float(res.member_asymptotes.mean()),
        "hole_deviation": deviation,
        "hole_time_range": list(hole_range),
        "moment_ratio": rmt.UNIFORM_MOMENT_RATIO.value,
        "sequences": [
            {
                "blocks": list(s.group_key),
                "multiplicity": s.multiplicity,
                "count": int(len(s.energies)),
                "density": float(len(s.energies) / (2.0 * window.half_width)),
            }
            for s in table.sequences
        ],
    }
    write_json(rundir / "params.json", params)
    if cfg.plots:
        from .plotting import plot_survival

        plot_survival(
            res.mean, analytic, binned, rundir / "survival.png",
            title=rundir.name, envelope=(res.member_lo, res.member_hi),
        )
    params["curves"] = {
        "mean": res.mean, "analytic": analytic,
        "binned": binned, "analytic_binned": binned_analytic,
    }
    return params


def run_survival(cfg: RunConfig) -> dict:
    cfg.validate()
    out = _prepare_out(cfg)
    results = {}
    for u in cfg.u_values:
        spectra, _ = _spectra_for(cfg, u)
        for selection in cfg.blocks:
            label = f"u{u:g}-{_selection_label(selection)}"
            results[label] = run_survival_single(cfg, spectra, selection, out / label)
    return results


# ---------------------------------------------------------------------------
# window sweep

def run_window_sweep(cfg: RunConfig) -> dict:
    cfg.validate()
    out = _prepare_out(cfg)
    u = cfg.u_values[0]
    spectra, _ = _spectra_for(cfg, u)
    if len(cfg.blocks) != 1:
        raise ConfigError("window sweep expects exactly one block selection")
    sel = _parse_selection(cfg.blocks[0])
    levels = selection_levels(spectra, sel)
    if cfg.window_levels > len(levels):
        raise ConfigError(
            f"windows of {cfg.window_levels} levels exceed the selection's {len(levels)} levels"
        )
    windows = sweep_windows(levels, count=cfg.window_levels, n_windows=cfg.n_windows)
    rows = []
    report = []
    for i, window in enumerate(windows):
        rundir = out / f"w{i}"
        params = run_survival_single(cfg, spectra, sel, rundir, window=window)
        rows.append(
            {
                "window": window,
                "binned": params["curves"]["binned"],
                "analytic_binned": params["curves"]["analytic_binned"],
                "hole_deviation": params["hole_deviation"],
            }
        )
        report.append(
            {
                "window": {"center": window.center, "half_width": window.half_width},
                "levels": cfg.window_levels,
                "eta": params["eta"],
                "hole_deviation": params["hole_deviation"],
            }
        )
    write_json(out / "windows.json", {"u": u, "selection": cfg.blocks[0], "windows": report})
    if cfg.plots:
        from .plotting import plot_window_sweep

        plot_window_sweep(rows, out / "window-sweep.png", title=f"u={u:g} {cfg.blocks[0]}")
    return {"windows": report, "rows": rows}
