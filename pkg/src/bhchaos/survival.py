"""Random-state ensembles in an energy window and their survival dynamics.

An ensemble member is defined directly in the energy eigenbasis: every level
slot inside the window gets a squared component r * f(E) / sum(r * f(E)),
where r is a uniform draw and f(E) = rho(E)/nu(E) compensates the level
density so the smoothed energy profile of each member is the rectangular
rho.  Conjugate momentum sectors are treated as exactly degenerate: the
lower sector's eigenvalues serve both slots, so degenerate components add
coherently in S(t) = |sum_k w_k exp(-i E_k t)|^2.

Member weights are reproducible: member m draws from a generator seeded
with SeedSequence([seed, m]), independent of chunking or thread count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import SurvivalCurve
from .errors import ConfigError, NumericalError
from .rmt import LevelSequenceSpec, SequenceSpec
from .spectra import SpectrumSet, resolve_selection

DEFAULT_TIME_POINTS = 600
_MEMBER_CHUNK = 256


@dataclass(frozen=True)
class EnergyWindow:
    """Rectangular profile: center and half-width of the populated interval."""

    center: float
    half_width: float

    def __post_init__(self):
        if self.half_width <= 0:
            raise ConfigError(f"window half-width must be positive, got {self.half_width}")

    @property
    def lo(self) -> float:
        return self.center - self.half_width

    @property
    def hi(self) -> float:
        return self.center + self.half_width

    def contains(self, energy) -> np.ndarray:
        e = np.asarray(energy, dtype=float)
        return (e >= self.lo) & (e <= self.hi)


@dataclass(frozen=True)
class LevelSequence:
    """In-window levels of one degeneracy group feeding the ensemble."""

    group_key: tuple[str, ...]   # block keys of the selected group members
    multiplicity: int            # slots per level = number of selected members
    energies: np.ndarray         # ascending in-window levels (one copy)


@dataclass(frozen=True)
class LevelTable:
    """Slot-resolved level structure of a block selection inside a window."""

    window: EnergyWindow
    sequences: tuple[LevelSequence, ...]
    slot_energies: np.ndarray    # (K,) one entry per component slot
    slot_level_ids: np.ndarray   # (K,) level identity for degenerate grouping
    slot_seq_ids: np.ndarray     # (K,) sequence index per slot

    @property
    def n_slots(self) -> int:
        return len(self.slot_energies)

    @property
    def n_levels(self) -> int:
        return int(self.slot_level_ids.max()) + 1 if self.n_slots else 0

    @property
    def nu_bar(self) -> float:
        """Mean in-window slot density (levels counted with multiplicity)."""
        return self.n_slots / (2.0 * self.window.half_width)

    def sequence_spec(self) -> SequenceSpec:
        seqs = [
            LevelSequenceSpec(
                multiplicity=s.multiplicity,
                density=len(s.energies) / (2.0 * self.window.half_width),
                count=len(s.energies),
            )
            for s in self.sequences
        ]
        return SequenceSpec.from_sequences(seqs)

    def dominant_density(self) -> float:
        return max(len(s.energies) for s in self.sequences) / (2.0 * self.window.half_width)


def select_levels(spectra: SpectrumSet, selection, window: EnergyWindow) -> LevelTable:
    """Collect in-window levels of a block selection, slot-expanded.

    Selected blocks are grouped by the degeneracy map; a group with both
    conjugate partners selected contributes two slots per level, both at the
    lower block's eigenvalue.
    """
    indices = set(resolve_selection(spectra, selection))
    sequences = []
    slot_e, slot_level, slot_seq = [], [], []
    level_base = 0
    for group in spectra.degeneracy.groups:
        chosen = sorted(set(group) & indices)
        if not chosen:
            continue
        ref = spectra.blocks[chosen[0]]
        inside = ref.eigenvalues[window.contains(ref.eigenvalues)]
        if inside.size == 0:
            continue
        d = len(chosen)
        seq_id = len(sequences)
        sequences.append(
            LevelSequence(
                group_key=tuple(spectra.blocks[i].key for i in chosen),
                multiplicity=d,
                energies=inside.copy(),
            )
        )
        ids = level_base + np.arange(inside.size)
        slot_e.append(np.repeat(inside, d))
        slot_level.append(np.repeat(ids, d))
        slot_seq.append(np.full(inside.size * d, seq_id))
        level_base += inside.size
    if not sequences or sum(len(s.energies) for s in sequences) < 2:
        raise NumericalError(
            f"window [{window.lo:.4g}, {window.hi:.4g}] contains fewer than 2 levels "
            "of the selected blocks"
        )
    return LevelTable(
        window=window,
        sequences=tuple(sequences),
        slot_energies=np.concatenate(slot_e),
        slot_level_ids=np.concatenate(slot_level),
        slot_seq_ids=np.concatenate(slot_seq),
    )


@dataclass(frozen=True)
class RandomStateEnsemble:
    """Lazy ensemble of random initial states over a level table."""

    table: LevelTable
    members: int
    seed: int
    shaping: np.ndarray  # f(E) = rho(E)/nu(E) per slot

    def weights_for(self, member: int) -> np.ndarray:
        """Squared components of one member; non-negative, summing to one."""
        rng = np.random.default_rng(np.random.SeedSequence([self.seed, member]))
        w = rng.random(self.table.n_slots) * self.shaping
        return w / w.sum()

    def weights_chunk(self, start: int, stop: int) -> np.ndarray:
        return np.stack([self.weights_for(m) for m in range(start, stop)])

    def weights_matrix(self) -> np.ndarray:
        return self.weights_chunk(0, self.members)


def sample_ensemble(
    table: LevelTable, dos, members: int | None = None, seed: int = 0
) -> RandomStateEnsemble:
    """Random-state ensemble with the rectangular profile of the table's window.

    members defaults to the number of slots (levels counted with degeneracy).
    dos is the smooth level density of the selection the table was built from.
    """
    if members is None:
        members = table.n_slots
    if members < 1:
        raise ConfigError(f"ensemble needs at least one member, got {members}")
    if seed < 0:
        raise ConfigError(f"seed must be non-negative, got {seed}")
    nu = np.asarray(dos(table.slot_energies), dtype=float)
    if np.any(~np.isfinite(nu)) or np.any(nu <= 0.0):
        raise NumericalError("level density is non-positive inside the window")
    rho = 1.0 / (2.0 * table.window.half_width)
    return RandomStateEnsemble(table=table, members=members, seed=seed, shaping=rho / nu)


def survival_numeric(weights: np.ndarray, energies: np.ndarray, t_grid: np.ndarray) -> SurvivalCurve:
    """S(t) = |sum_k w_k exp(-i E_k t)|^2 for one member's squared components."""
    t = np.asarray(t_grid, dtype=float)
    phases = np.exp(-1j * np.outer(np.asarray(energies, float), t))
    amp = np.asarray(weights, float) @ phases
    values = np.clip(np.abs(amp) ** 2, 0.0, 1.0)
    return SurvivalCurve(times=t, values=values, kind="single-member")


def asymptotic_value(weights: np.ndarray, level_ids: np.ndarray) -> float:
    """Infinite-time average: sum over levels of the squared slot-group weight.

    Without degeneracies (unique level ids) this is sum_k w_k^2; degenerate
    slots are summed coherently before squaring.
    """
    w = np.asarray(weights, dtype=float)
    group = np.bincount(np.asarray(level_ids), weights=w)
    return float(np.sum(group * group))


@dataclass(frozen=True)
class EnsembleSurvival:
    """Ensemble-mean survival curve plus member statistics."""

    mean: SurvivalCurve
    member_lo: np.ndarray       # lower percentile envelope across members
    member_hi: np.ndarray       # upper percentile envelope
    member_asymptotes: np.ndarray  # per-member infinite-time averages


def ensemble_survival(
    ensemble: RandomStateEnsemble,
    t_grid: np.ndarray,
    percentiles: tuple[float, float] = (10.0, 90.0),
    chunk: int = _MEMBER_CHUNK,
) -> EnsembleSurvival:
    """Evolve every member and average; deterministic for a fixed seed.

    Members are processed in fixed-size chunks through two real matrix
    products per chunk; member curves are exact per member, and the mean is
    accumulated in member order for a reproducible reduction.
    """
    table = ensemble.table
    t = np.asarray(t_grid, dtype=float)
    arg = np.outer(table.slot_energies, t)
    ph_re = np.cos(arg)
    ph_im = np.sin(arg)  # sign of the imaginary part drops out in |amp|^2
    del arg
    level_ids = table.slot_level_ids
    order = np.argsort(level_ids, kind="stable")
    starts = np.flatnonzero(np.r_[1, np.diff(level_ids[order])])

    m = ensemble.members
    all_values = np.empty((m, len(t)))
    asymptotes = np.empty(m)
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        w = ensemble.weights_chunk(lo, hi)
        s = (w @ ph_re) ** 2 + (w @ ph_im) ** 2
        np.clip(s, 0.0, 1.0, out=s)
        all_values[lo:hi] = s
        grouped = np.add.reduceat(w[:, order], starts, axis=1)
        asymptotes[lo:hi] = np.sum(grouped * grouped, axis=1)
    mean = SurvivalCurve(times=t, values=all_values.mean(axis=0), kind="ensemble-mean")
    lo_env = np.percentile(all_values, percentiles[0], axis=0)
    hi_env = np.percentile(all_values, percentiles[1], axis=0)
    return EnsembleSurvival(
        mean=mean, member_lo=lo_env, member_hi=hi_env, member_asymptotes=asymptotes
    )


def default_time_grid(
    window: EnergyWindow, nu_bar: float, points: int = DEFAULT_TIME_POINTS
) -> np.ndarray:
    """Log-spaced grid covering decay, correlation hole, and saturation."""
    t_min = 1e-2 / window.half_width
    t_max = 1e3 * 2.0 * np.pi * nu_bar
    return np.geomspace(t_min, t_max, points)


def survey_time_grid(
    window: EnergyWindow,
    nu_bar: float,
    dominant_density: float,
    points: int = DEFAULT_TIME_POINTS,
    hole_points: int = 2000,
    late_points: int = 1000,
) -> np.ndarray:
    """Descriptive log grid densified inside the hole and saturation regions.

    The ensemble mean is not self-averaging: realization-specific spectral
    fluctuations at the hole scale survive any ensemble size and only
    temporal smoothing tames them.  Extra samples where the correlation hole
    develops (0.05..5 sequence Heisenberg times) and where the curve
    saturates (10..100 total Heisenberg times) give the log-bin averages
    enough independent points to beat those fluctuations down.
    """
    t_h_seq = 2.0 * np.pi * dominant_density
    t_h_tot = 2.0 * np.pi * nu_bar
    parts = [default_time_grid(window, nu_bar, points)]
    if hole_points:
        parts.append(np.geomspace(0.05 * t_h_seq, 5.0 * t_h_seq, hole_points))
    if late_points:
        parts.append(np.geomspace(10.0 * t_h_tot, 100.0 * t_h_tot, late_points))
    return np.unique(np.concatenate(parts))


def late_time_average(curve: SurvivalCurve, nu_bar: float) -> float:
    """Mean of the curve over t in [10, 100] Heisenberg times 2*pi*nu_bar."""
    t_h = 2.0 * np.pi * nu_bar
    mask = (curve.times >= 10.0 * t_h) & (curve.times <= 100.0 * t_h)
    if not mask.any():
        raise ConfigError("time grid does not reach the saturation regime")
    return float(curve.values[mask].mean())


def level_count_window(levels: np.ndarray, center_fraction: float, count: int) -> EnergyWindow:
    """Window spanning `count` consecutive levels centered at an index fraction.

    center_fraction = 0.5 sits in the middle of the spectrum; values toward 1
    slide the window to the high-energy border (clamped so it still fits).
    """
    levels = np.sort(np.asarray(levels, dtype=float))
    n = len(levels)
    if count < 2 or count > n:
        raise ConfigError(f"window level count {count} outside [2, {n}]")
    center = int(round(center_fraction * (n - 1)))
    lo = min(max(center - count // 2, 0), n - count)
    e_lo, e_hi = levels[lo], levels[lo + count - 1]
    # pad by a few ulps so center -/+ half_width still covers both edge levels
    half = 0.5 * (e_hi - e_lo) * (1.0 + 1e-12)
    return EnergyWindow(center=0.5 * (e_lo + e_hi), half_width=half)


def sweep_windows(levels: np.ndarray, count: int, n_windows: int) -> list[EnergyWindow]:
    """Equal-count windows sliding from the spectrum center to its upper border."""
    if n_windows < 1:
        raise ConfigError(f"need at least one window, got {n_windows}")
    n = len(levels)
    # highest center index whose window still fits: the last window covers
    # exactly the topmost `count` levels
    top = (n - count + count // 2) / (n - 1)
    fractions = np.linspace(0.5, top, n_windows) if n_windows > 1 else np.array([0.5])
    return [level_count_window(levels, f, count) for f in fractions]
