"""Figure rendering for the report paths.

Every plot is a convenience view of data that is also written as CSV; the
delimited files remain the canonical output.  Uses the Agg backend so the
CLI works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .curves import SurvivalCurve
from .spectra import DosResult
from .statistics import SpacingHistogram


def _bar_centers(edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return 0.5 * (edges[:-1] + edges[1:]), np.diff(edges)


def plot_dos(dos: DosResult, path, title: str = "Density of states") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    centers, widths = _bar_centers(dos.histogram.edges)
    ax.bar(centers, dos.histogram.density, width=widths, color="0.7", label="levels")
    grid = np.linspace(dos.histogram.edges[0], dos.histogram.edges[-1], 400)
    ax.plot(grid, dos.fit(grid), "r--", label="Gaussian fit")
    ax.set_xlabel("energy")
    ax.set_ylabel("levels per unit energy")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_spacing(hist: SpacingHistogram, path, title: str = "Spacing distribution") -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    centers, widths = _bar_centers(hist.edges)
    ax.bar(centers, hist.density, width=widths, color="0.7", label="data")
    goe_label = "GOE" if hist.mode == "gap-ratio" else "Wigner-Dyson"
    ax.plot(centers, hist.wigner_ref, "r--", label=goe_label)
    ax.plot(centers, hist.poisson_ref, "b-", label="Poisson")
    ax.set_xlabel("gap ratio" if hist.mode == "gap-ratio" else "unfolded spacing")
    ax.set_ylabel("density")
    ax.set_title(f"{title}  (mean gap ratio {hist.r_mean:.4f})")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_survival(
    numeric: SurvivalCurve,
    analytic: SurvivalCurve,
    binned: SurvivalCurve,
    path,
    title: str = "Survival probability",
    envelope: tuple[np.ndarray, np.ndarray] | None = None,
) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if envelope is not None:
        ax.fill_between(numeric.times, envelope[0], envelope[1], color="0.85", label="member envelope")
    ax.plot(numeric.times, numeric.values, color="darkred", lw=0.8, alpha=0.6, label="ensemble mean")
    ax.plot(binned.times, binned.values, color="darkred", lw=2.0, label="log-binned mean")
    ax.plot(analytic.times, analytic.values, color="limegreen", lw=1.6, label="analytic")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("survival probability")
    ax.set_title(title)
    ax.legend(loc="lower left")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_window_sweep(rows: list[dict], path, title: str = "Window sweep") -> None:
    """One panel per window: log-binned numeric vs analytic curves."""
    fig, axes = plt.subplots(len(rows), 1, figsize=(7, 3 * len(rows)), squeeze=False)
    for ax, row in zip(axes[:, 0], rows):
        binned, analytic = row["binned"], row["analytic_binned"]
        ax.plot(binned.times, binned.values, color="darkred", lw=1.8, label="numeric")
        ax.plot(analytic.times, analytic.values, color="limegreen", lw=1.5, label="analytic")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_ylabel("survival")
        ax.set_title(
            f"window [{row['window'].lo:.3g}, {row['window'].hi:.3g}], "
            f"deviation {row['hole_deviation']:.3f}"
        )
        ax.legend(loc="lower left")
    axes[-1, 0].set_xlabel("t")
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
