"""Closed-form GOE predictions for the ensemble-averaged survival probability.

The average over random in-window initial states decays as a squared sinc
(the Fourier transform of the rectangular energy profile), dips below its
saturation value, and is pulled back up on the Heisenberg scale by the GOE
two-level form factor: the correlation hole.  The general expression handles
any number of independent level sequences with integer degeneracies d_i and
in-window densities nu_i satisfying sum_i d_i * nu_i = nu:

    <S(t)> = S_inf + (1 - q/eta)/(eta - 1)
             * [ eta * sinc^2(sigma*t)
                 - sum_i d_i^2 * (nu_i/nu) * b2(t / (2*pi*nu_i)) ]

with q the component moment ratio <r^2>/<r>^2 (4/3 for uniform draws) and

    S_inf = q/eta + (1 - q/eta)/(eta - 1) * sum_i d_i*(d_i - 1)*nu_i/nu.

The prefactor (1 - q/eta)/(eta - 1) makes <S(0)> = 1 exactly for every
degeneracy structure; it coincides with the familiar (1 - S_inf)/(eta - 1)
whenever all d_i = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .curves import DEFAULT_BINS_PER_DECADE, SurvivalCurve, log_bin
from .errors import ConfigError, NumericalError

SUM_RULE_TOLERANCE = 0.01


def two_level_form_factor(t):
    """GOE two-level form factor b2 on the unfolded time axis.

    b2(t) = 1 - 2t + t*ln(2t+1)              for t <= 1
          = t*ln((2t+1)/(2t-1)) - 1          for t > 1

    Continuous at t = 1 (both branches give ln(3) - 1), decreasing from
    b2(0) = 1 to zero.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    below = t <= 1.0
    tb = t[below]
    out[below] = 1.0 - 2.0 * tb + tb * np.log1p(2.0 * tb)
    mid = ~below & (t <= 100.0)
    tm = t[mid]
    out[mid] = tm * np.log((2.0 * tm + 1.0) / (2.0 * tm - 1.0)) - 1.0
    # far tail: t*log((2t+1)/(2t-1)) - 1 cancels catastrophically; use the
    # atanh series 1/(12 t^2) + 1/(80 t^4) + O(t^-6), exact to ~1e-13 here
    far = t > 100.0
    tf = t[far]
    out[far] = 1.0 / (12.0 * tf * tf) + 1.0 / (80.0 * tf**4)
    return out if out.ndim else float(out)


def sinc_squared_decay(t, half_width: float):
    """Early-time envelope sin^2(sigma*t) / (sigma*t)^2 of a rectangular profile."""
    if half_width <= 0:
        raise ConfigError(f"profile half-width must be positive, got {half_width}")
    # numpy's sinc is sin(pi x)/(pi x); rescale and square.
    x = np.asarray(t, dtype=float) * half_width / np.pi
    out = np.sinc(x) ** 2
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class MomentRatio:
    """Moment ratio <r^2>/<r>^2 of the component distribution p(r)."""

    value: float

    def __post_init__(self):
        if self.value < 1.0:
            raise ConfigError(f"moment ratio must be >= 1, got {self.value}")


UNIFORM_MOMENT_RATIO = MomentRatio(4.0 / 3.0)  # <r^n> = 1/(n+1) for uniform draws


@dataclass(frozen=True)
class LevelSequenceSpec:
    """One independent sequence: degeneracy, in-window mean density, count."""

    multiplicity: int
    density: float
    count: int

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ConfigError(f"degeneracy must be a positive integer, got {self.multiplicity}")
        if self.density <= 0:
            raise ConfigError(f"sequence density must be positive, got {self.density}")


@dataclass(frozen=True)
class SequenceSpec:
    """Degeneracy structure of the levels feeding one random-state ensemble."""

    sequences: tuple[LevelSequenceSpec, ...]
    nu_bar: float  # total in-window slot density, sum_i d_i * nu_i

    def __post_init__(self):
        if not self.sequences:
            raise ConfigError("need at least one level sequence")
        total = sum(s.multiplicity * s.density for s in self.sequences)
        if abs(total - self.nu_bar) > SUM_RULE_TOLERANCE * self.nu_bar:
            raise ConfigError(
                f"density sum rule violated: sum d_i*nu_i = {total:.6g} vs nu_bar = {self.nu_bar:.6g}"
            )

    @classmethod
    def from_sequences(cls, sequences) -> "SequenceSpec":
        seqs = tuple(sequences)
        return cls(sequences=seqs, nu_bar=sum(s.multiplicity * s.density for s in seqs))

    @property
    def degeneracy_weight(self) -> float:
        """sum_i d_i*(d_i - 1) * nu_i / nu; zero without degeneracies."""
        return sum(s.multiplicity * (s.multiplicity - 1) * s.density for s in self.sequences) / self.nu_bar

    def dominant_density(self) -> float:
        return max(s.density for s in self.sequences)


def single_sequence(count: int, half_width: float) -> SequenceSpec:
    """Non-degenerate spec for one symmetry sector's in-window levels."""
    nu = count / (2.0 * half_width)
    return SequenceSpec.from_sequences([LevelSequenceSpec(1, nu, count)])


def effective_dimension(window, dos) -> float:
    """Effective number of participating levels for a rectangular profile.

    eta = 4*sigma^2 / integral over the window of dE / nu(E), computed by
    adaptive quadrature; equals the in-window level count when nu is flat.
    """
    lo, hi = window.lo, window.hi
    edge = min(float(dos(lo)), float(dos(hi)))
    if not np.isfinite(edge) or edge <= 0.0:
        raise NumericalError(
            f"level density vanishes inside the window [{lo:.4g}, {hi:.4g}]"
        )
    integral, _ = quad(lambda e: 1.0 / float(dos(e)), lo, hi, epsrel=1e-8, limit=200)
    return 4.0 * window.half_width**2 / integral


def effective_dimension_mean_dos(window, nu_bar: float) -> float:
    """Flat-density shortcut: eta ~ 2*sigma*nu_bar, the in-window level count."""
    return 2.0 * window.half_width * nu_bar


def ensemble_asymptote(
    spec: SequenceSpec, eta: float, moments: MomentRatio = UNIFORM_MOMENT_RATIO
) -> float:
    """Ensemble-averaged saturation value of the survival probability."""
    if eta <= 1.0:
        raise ConfigError(f"effective dimension must exceed 1, got {eta}")
    q = moments.value
    return q / eta + (1.0 - q / eta) / (eta - 1.0) * spec.degeneracy_weight


def analytic_survival(
    spec: SequenceSpec,
    window,
    eta: float,
    t_grid: np.ndarray,
    moments: MomentRatio = UNIFORM_MOMENT_RATIO,
) -> SurvivalCurve:
    """Closed-form ensemble-averaged survival probability on a time grid."""
    if eta <= 1.0:
        raise ConfigError(f"effective dimension must exceed 1, got {eta}")
    total = sum(s.multiplicity * s.density for s in spec.sequences)
    if abs(total - spec.nu_bar) > 5 * SUM_RULE_TOLERANCE * spec.nu_bar:
        raise ConfigError("sequence spec violates the density sum rule")
    q = moments.value
    s_inf = ensemble_asymptote(spec, eta, moments)
    t = np.asarray(t_grid, dtype=float)
    bracket = eta * sinc_squared_decay(t, window.half_width)
    for s in spec.sequences:
        weight = s.multiplicity**2 * s.density / spec.nu_bar
        bracket = bracket - weight * two_level_form_factor(t / (2.0 * np.pi * s.density))
    values = s_inf + (1.0 - q / eta) / (eta - 1.0) * bracket
    return SurvivalCurve(times=t, values=values, kind="analytic")


def hole_deviation(
    numeric: SurvivalCurve,
    analytic: SurvivalCurve,
    t_range: tuple[float, float],
    bins_per_decade: int = DEFAULT_BINS_PER_DECADE,
) -> float:
    """Mean relative deviation of the log-binned curves over a time range."""
    if numeric.times.shape != analytic.times.shape or not np.allclose(
        numeric.times, analytic.times
    ):
        raise ConfigError("numeric and analytic curves live on different time grids")
    num = log_bin(numeric, bins_per_decade)
    ana = log_bin(analytic, bins_per_decade)
    lo, hi = t_range
    mask = (num.times >= lo) & (num.times <= hi)
    if not mask.any():
        raise ConfigError(f"no log-binned samples inside t range [{lo:.4g}, {hi:.4g}]")
    return float(np.mean(np.abs(num.values[mask] - ana.values[mask]) / ana.values[mask]))


def hole_time_range(dominant_density: float, lo: float = 0.05, hi: float = 5.0) -> tuple[float, float]:
    """Correlation-hole window in time, scaled by the dominant Heisenberg time."""
    t_h = 2.0 * np.pi * dominant_density
    return lo * t_h, hi * t_h
