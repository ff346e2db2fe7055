"""Survival-probability curves and their temporal smoothing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

DEFAULT_BINS_PER_DECADE = 20


@dataclass(frozen=True)
class SurvivalCurve:
    """Survival probability sampled on an ascending time grid."""

    times: np.ndarray
    values: np.ndarray
    kind: str  # "single-member" | "ensemble-mean" | "log-binned-mean" | "analytic"

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise ConfigError("time grid and values must have matching shapes")


def ensemble_average(curves: list[SurvivalCurve]) -> SurvivalCurve:
    """Pointwise mean of member curves sharing one time grid."""
    if not curves:
        raise ConfigError("cannot average an empty set of curves")
    t = curves[0].times
    for c in curves[1:]:
        if c.times.shape != t.shape or not np.array_equal(c.times, t):
            raise ConfigError("curves live on mismatched time grids")
    stacked = np.stack([c.values for c in curves])
    return SurvivalCurve(times=t, values=stacked.mean(axis=0), kind="ensemble-mean")


def log_bin(curve: SurvivalCurve, bins_per_decade: int = DEFAULT_BINS_PER_DECADE) -> SurvivalCurve:
    """Average within geometric time windows of constant logarithmic width.

    Binned values are plotted against the mean time of each window; empty
    windows are dropped.  Requires strictly positive times.
    """
    t = curve.times
    if np.any(t <= 0):
        raise ConfigError("log binning requires strictly positive times")
    if bins_per_decade < 1:
        raise ConfigError("bins_per_decade must be at least 1")
    lo, hi = np.log10(t[0]), np.log10(t[-1])
    n_bins = max(1, int(np.ceil((hi - lo) * bins_per_decade)))
    edges = np.logspace(lo, hi, n_bins + 1)
    edges[-1] = np.nextafter(edges[-1], np.inf)  # keep the last sample inside
    which = np.digitize(t, edges) - 1
    times, values = [], []
    for b in range(n_bins):
        mask = which == b
        if mask.any():
            times.append(t[mask].mean())
            values.append(curve.values[mask].mean())
    return SurvivalCurve(times=np.array(times), values=np.array(values), kind="log-binned-mean")
