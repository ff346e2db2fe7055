"""Spectral fluctuation statistics: unfolding, spacings, and gap ratios.

Unfolding maps a spectrum through a smooth polynomial fit of its cumulative
staircase so the local mean spacing becomes one, isolating universal
fluctuations.  Spacing histograms are compared against the GOE Wigner-Dyson
surmise P(s) = (pi*s/2) exp(-pi*s^2/4) and the Poisson law exp(-s); the
binning-free diagnostic is the adjacent-gap ratio
r_k = min(s_k, s_{k+1}) / max(s_k, s_{k+1}), whose mean is ~0.5307 for GOE
and 2*ln(2) - 1 ~ 0.3863 for uncorrelated levels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ConfigError, UnfoldingError

GOE_MEAN_GAP_RATIO = 0.5307
POISSON_MEAN_GAP_RATIO = 2.0 * np.log(2.0) - 1.0

DEFAULT_UNFOLD_DEGREE = 6
SPACING_BIN_WIDTH = 0.1
SPACING_RANGE = (0.0, 4.0)
GAP_RATIO_BINS = 20


def central_fraction(levels: np.ndarray, keep_fraction: float) -> np.ndarray:
    """Central keep_fraction of a sorted spectrum, trimmed symmetrically."""
    if not 0.0 < keep_fraction <= 1.0:
        raise ConfigError(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    levels = np.sort(np.asarray(levels, dtype=float))
    n = len(levels)
    drop = int(round(0.5 * (1.0 - keep_fraction) * n))
    return levels[drop : n - drop] if drop else levels


def unfold(
    levels: np.ndarray,
    degree: int = DEFAULT_UNFOLD_DEGREE,
    keep_fraction: float = 1.0,
) -> np.ndarray:
    """Map levels through a degree-d polynomial fit of the staircase.

    The retained central keep_fraction of the sorted spectrum is fitted
    against its own counting function (k + 1/2 at the k-th level) and each
    level is replaced by the fitted value, so unfolded spacings average one.
    """
    levels = central_fraction(levels, keep_fraction)
    n = len(levels)
    if n < degree + 2:
        raise ConfigError(f"need at least degree+2={degree + 2} levels, got {n}")
    staircase = np.arange(n) + 0.5
    # Fit in the scaled domain [-1, 1]; flag a numerically useless design matrix.
    poly = Polynomial.fit(levels, staircase, deg=degree)
    x = (levels - 0.5 * (levels[0] + levels[-1])) / (0.5 * (levels[-1] - levels[0]) or 1.0)
    design = np.vander(x, degree + 1, increasing=True)
    cond = float(np.linalg.cond(design))
    if not np.isfinite(cond) or cond > 1e12:
        raise UnfoldingError(
            f"ill-conditioned staircase fit (condition {cond:.3e}) at degree {degree}",
            condition=cond,
        )
    unfolded = poly(levels)
    return np.maximum.accumulate(unfolded)  # guard against tiny non-monotonic fit wiggles


def wigner_dyson_pdf(s):
    s = np.asarray(s, dtype=float)
    return 0.5 * np.pi * s * np.exp(-0.25 * np.pi * s * s)


def poisson_pdf(s):
    return np.exp(-np.asarray(s, dtype=float))


def gap_ratio_goe_pdf(r):
    """GOE surmise for the bounded gap ratio on [0, 1]."""
    r = np.asarray(r, dtype=float)
    return 2.0 * (27.0 / 8.0) * (r + r * r) / (1.0 + r + r * r) ** 2.5


def gap_ratio_poisson_pdf(r):
    """Poisson law for the bounded gap ratio on [0, 1]."""
    r = np.asarray(r, dtype=float)
    return 2.0 / (1.0 + r) ** 2


def gap_ratios(levels: np.ndarray) -> np.ndarray:
    """Adjacent-gap ratios of a raw (not unfolded) sorted spectrum."""
    levels = np.sort(np.asarray(levels, dtype=float))
    s = np.diff(levels)
    ratios = np.minimum(s[:-1], s[1:]) / np.maximum(s[:-1], s[1:])
    return ratios[np.isfinite(ratios)]


@dataclass(frozen=True)
class SpacingHistogram:
    """Normalized spacing (or gap-ratio) histogram with reference curves."""

    mode: str                 # "spacing" or "gap-ratio"
    edges: np.ndarray
    density: np.ndarray
    wigner_ref: np.ndarray    # GOE reference sampled at bin centers
    poisson_ref: np.ndarray   # Poisson reference sampled at bin centers
    r_mean: float             # mean adjacent-gap ratio of the input levels

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def chi_square(self, reference: str) -> float:
        """Chi-square distance of the histogram to one reference curve."""
        ref = {"wigner": self.wigner_ref, "poisson": self.poisson_ref}[reference]
        mask = ref > 1e-3
        return float(np.sum((self.density[mask] - ref[mask]) ** 2 / ref[mask]))


def spacing_statistics(levels: np.ndarray, mode: str = "spacing") -> SpacingHistogram:
    """Histogram of nearest-neighbor spacings or of adjacent-gap ratios.

    "spacing" expects unfolded levels (mean spacing one) and bins their
    differences on [0, 4]; "gap-ratio" works on raw levels and bins the
    scale-free ratios on [0, 1].  Both attach reference curves evaluated at
    the bin centers and the mean gap ratio.
    """
    levels = np.sort(np.asarray(levels, dtype=float))
    if len(levels) < 3:
        raise ConfigError(f"need at least 3 levels, got {len(levels)}")
    ratios = gap_ratios(levels)
    r_mean = float(ratios.mean()) if len(ratios) else float("nan")
    if mode == "spacing":
        spacings = np.diff(levels)
        edges = np.arange(SPACING_RANGE[0], SPACING_RANGE[1] + SPACING_BIN_WIDTH / 2, SPACING_BIN_WIDTH)
        density, _ = np.histogram(spacings, bins=edges, density=True)
        centers = 0.5 * (edges[:-1] + edges[1:])
        return SpacingHistogram(
            mode=mode,
            edges=edges,
            density=density,
            wigner_ref=wigner_dyson_pdf(centers),
            poisson_ref=poisson_pdf(centers),
            r_mean=r_mean,
        )
    if mode == "gap-ratio":
        edges = np.linspace(0.0, 1.0, GAP_RATIO_BINS + 1)
        density, _ = np.histogram(ratios, bins=edges, density=True)
        centers = 0.5 * (edges[:-1] + edges[1:])
        return SpacingHistogram(
            mode=mode,
            edges=edges,
            density=density,
            wigner_ref=gap_ratio_goe_pdf(centers),
            poisson_ref=gap_ratio_poisson_pdf(centers),
            r_mean=r_mean,
        )
    raise ConfigError(f"unknown statistics mode {mode!r}")
