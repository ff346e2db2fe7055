import numpy as np
import pytest

from bhchaos.curves import SurvivalCurve, ensemble_average, log_bin
from bhchaos.errors import ConfigError, NumericalError
from bhchaos.hamiltonian import ModelParams
from bhchaos.spectra import compute_spectra, density_of_states
from bhchaos.survival import (
    EnergyWindow,
    LevelSequence,
    LevelTable,
    asymptotic_value,
    ensemble_survival,
    late_time_average,
    level_count_window,
    sample_ensemble,
    select_levels,
    survival_numeric,
    survey_time_grid,
    sweep_windows,
)


def make_table(energies, multiplicity=1, window=None):
    energies = np.asarray(energies, dtype=float)
    if window is None:
        pad = 0.05 * (energies[-1] - energies[0] + 1.0)
        window = EnergyWindow(
            center=0.5 * (energies[0] + energies[-1]),
            half_width=0.5 * (energies[-1] - energies[0]) + pad,
        )
    seq = LevelSequence(group_key=("1",), multiplicity=multiplicity, energies=energies)
    ids = np.arange(len(energies))
    return LevelTable(
        window=window,
        sequences=(seq,),
        slot_energies=np.repeat(energies, multiplicity),
        slot_level_ids=np.repeat(ids, multiplicity),
        slot_seq_ids=np.zeros(len(energies) * multiplicity, dtype=int),
    )


def flat_dos(value):
    return lambda e: np.full_like(np.asarray(e, dtype=float), value)


def test_energy_window_validation():
    with pytest.raises(ConfigError):
        EnergyWindow(0.0, 0.0)
    w = EnergyWindow(1.0, 2.0)
    assert (w.lo, w.hi) == (-1.0, 3.0)
    assert w.contains(np.array([-1.0, 0.0, 3.0, 3.1])).tolist() == [True, True, True, False]


def test_select_levels_degenerate_groups():
    spectra = compute_spectra(ModelParams(5, 4, 0.5))
    window = EnergyWindow(0.0, 100.0)  # everything
    both = select_levels(spectra, ["1", "4"], window)
    assert len(both.sequences) == 1
    assert both.sequences[0].multiplicity == 2
    assert both.n_slots == 2 * spectra.block("1").dim
    # degenerate slots carry the lower block's eigenvalues twice
    assert np.array_equal(np.unique(both.slot_energies), np.unique(spectra.block("1").eigenvalues))

    single = select_levels(spectra, "4", window)
    assert single.sequences[0].multiplicity == 1
    assert single.n_slots == spectra.block("4").dim


def test_select_levels_empty_window():
    spectra = compute_spectra(ModelParams(5, 4, 0.5))
    with pytest.raises(NumericalError):
        select_levels(spectra, "1", EnergyWindow(1e6, 1.0))


def test_sample_ensemble_weights_normalized():
    table = make_table(np.linspace(0.0, 10.0, 40))
    ens = sample_ensemble(table, flat_dos(4.0), seed=11)
    assert ens.members == table.n_slots
    for m in (0, 3, ens.members - 1):
        w = ens.weights_for(m)
        assert np.all(w >= 0)
        assert w.sum() == pytest.approx(1.0, abs=1e-12)


def test_flat_density_weights_proportional_to_draws():
    table = make_table(np.linspace(0.0, 10.0, 25))
    ens = sample_ensemble(table, flat_dos(7.0), seed=5)
    rng = np.random.default_rng(np.random.SeedSequence([5, 2]))
    r = rng.random(25)
    assert np.allclose(ens.weights_for(2), r / r.sum(), atol=1e-15)


def test_single_slot_weight_is_one():
    table = make_table([1.0, 2.0])
    # restrict to one slot by hand: a single level always gets weight 1
    one = LevelTable(
        window=table.window,
        sequences=table.sequences,
        slot_energies=table.slot_energies[:1],
        slot_level_ids=table.slot_level_ids[:1],
        slot_seq_ids=table.slot_seq_ids[:1],
    )
    ens = sample_ensemble(one, flat_dos(1.0), members=3, seed=0)
    for m in range(3):
        assert ens.weights_for(m)[0] == pytest.approx(1.0)


def test_ensemble_reproducibility():
    table = make_table(np.linspace(0.0, 5.0, 30))
    a = sample_ensemble(table, flat_dos(6.0), seed=42).weights_matrix()
    b = sample_ensemble(table, flat_dos(6.0), seed=42).weights_matrix()
    c = sample_ensemble(table, flat_dos(6.0), seed=43).weights_matrix()
    assert a.tobytes() == b.tobytes()
    assert a.tobytes() != c.tobytes()


def test_ensemble_rejects_bad_density():
    table = make_table(np.linspace(0.0, 5.0, 10))
    with pytest.raises(NumericalError):
        sample_ensemble(table, flat_dos(0.0))
    with pytest.raises(ConfigError):
        sample_ensemble(table, flat_dos(1.0), members=0)
    with pytest.raises(ConfigError):
        sample_ensemble(table, flat_dos(1.0), seed=-1)


def test_survival_starts_at_one():
    w = np.array([0.2, 0.3, 0.5])
    curve = survival_numeric(w, np.array([0.0, 1.0, 2.5]), np.array([0.0, 0.1]))
    assert curve.values[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all((curve.values >= 0) & (curve.values <= 1))


def test_two_level_interference():
    gap = 0.8
    t = np.linspace(0.0, 20.0, 400)
    curve = survival_numeric(np.array([0.5, 0.5]), np.array([0.0, gap]), t)
    assert np.allclose(curve.values, np.cos(0.5 * gap * t) ** 2, atol=1e-12)
    at_node = survival_numeric(np.array([0.5, 0.5]), np.array([0.0, gap]), np.array([np.pi / gap]))
    assert at_node.values[0] == pytest.approx(0.0, abs=1e-12)


def test_degenerate_slots_add_coherently():
    t = np.geomspace(0.01, 50.0, 100)
    split = survival_numeric(
        np.array([0.25, 0.35, 0.4]), np.array([1.0, 1.0, 3.0]), t
    )
    merged = survival_numeric(np.array([0.6, 0.4]), np.array([1.0, 3.0]), t)
    assert np.allclose(split.values, merged.values, atol=1e-12)


def test_asymptotic_value_uniform_cases():
    n = 8
    ids = np.arange(n)
    w = np.full(n, 1.0 / n)
    assert asymptotic_value(w, ids) == pytest.approx(1.0 / n)
    # doubly degenerate: 2n slots with uniform weights, paired level ids
    w2 = np.full(2 * n, 1.0 / (2 * n))
    ids2 = np.repeat(np.arange(n), 2)
    assert asymptotic_value(w2, ids2) == pytest.approx(1.0 / n)


def test_asymptotic_value_matches_time_average():
    """Direct numerical time average against the closed sum."""
    rng = np.random.default_rng(9)
    energies = np.cumsum(0.5 + rng.random(40))
    w = rng.random(40)
    w /= w.sum()
    t = np.linspace(100.0, 1000.0, 20001)
    avg = survival_numeric(w, energies, t).values.mean()
    assert avg == pytest.approx(asymptotic_value(w, np.arange(40)), rel=0.05)


def test_ensemble_survival_matches_member_curves():
    table = make_table(np.cumsum(0.5 + np.random.default_rng(2).random(30)))
    ens = sample_ensemble(table, flat_dos(2.0), members=12, seed=3)
    t = np.geomspace(0.01, 200.0, 150)
    res = ensemble_survival(ens, t, chunk=5)
    curves = [survival_numeric(ens.weights_for(m), table.slot_energies, t) for m in range(12)]
    assert np.allclose(res.mean.values, ensemble_average(curves).values, atol=1e-12)
    for m in (0, 7, 11):
        expected = asymptotic_value(ens.weights_for(m), table.slot_level_ids)
        assert res.member_asymptotes[m] == pytest.approx(expected, abs=1e-14)
    assert np.all(res.member_lo <= res.member_hi)


def test_ensemble_average_validation():
    t = np.array([0.0, 1.0])
    a = SurvivalCurve(times=t, values=np.array([1.0, 0.5]), kind="single-member")
    assert np.array_equal(ensemble_average([a]).values, a.values)
    b = SurvivalCurve(times=t + 1.0, values=np.array([1.0, 0.5]), kind="single-member")
    with pytest.raises(ConfigError):
        ensemble_average([a, b])
    with pytest.raises(ConfigError):
        ensemble_average([])


def test_log_bin_preserves_constants():
    t = np.geomspace(0.1, 1000.0, 500)
    curve = SurvivalCurve(times=t, values=np.full_like(t, 0.37), kind="ensemble-mean")
    binned = log_bin(curve)
    assert np.allclose(binned.values, 0.37)
    assert len(binned.times) < len(t)
    assert np.all(np.diff(binned.times) > 0)


def test_log_bin_validation():
    t = np.linspace(0.0, 1.0, 10)
    curve = SurvivalCurve(times=t, values=np.ones_like(t), kind="ensemble-mean")
    with pytest.raises(ConfigError):
        log_bin(curve)  # non-positive times
    good = SurvivalCurve(times=t + 1.0, values=np.ones_like(t), kind="ensemble-mean")
    with pytest.raises(ConfigError):
        log_bin(good, bins_per_decade=0)


def test_early_decay_matches_profile_transform():
    """Mean early decay follows the squared sinc of the window half-width."""
    from bhchaos.rmt import sinc_squared_decay

    rng = np.random.default_rng(12)
    levels = np.sort(rng.uniform(-3.0, 3.0, 2000))
    window = EnergyWindow(0.0, 3.0)
    table = make_table(levels, window=window)
    ens = sample_ensemble(table, flat_dos(2000 / 6.0), members=400, seed=1)
    t = np.geomspace(1e-3, 0.5 / window.half_width, 60)
    res = ensemble_survival(ens, t)
    expected = sinc_squared_decay(t, window.half_width)
    assert np.max(np.abs(res.mean.values - expected) / expected) < 0.02


def test_late_time_average_requires_coverage():
    t = np.geomspace(0.01, 1.0, 50)
    curve = SurvivalCurve(times=t, values=np.ones_like(t), kind="ensemble-mean")
    with pytest.raises(ConfigError):
        late_time_average(curve, nu_bar=100.0)


def test_survey_time_grid_covers_all_regimes():
    window = EnergyWindow(0.0, 2.0)
    t = survey_time_grid(window, nu_bar=100.0, dominant_density=50.0)
    assert t[0] <= 1e-2 / window.half_width
    assert t[-1] >= 100.0 * 2 * np.pi * 100.0
    assert np.all(np.diff(t) > 0)


def test_level_count_window_contains_exact_count():
    rng = np.random.default_rng(8)
    levels = np.sort(rng.normal(0.0, 3.0, 1500))
    for frac in (0.5, 0.75, 1.0):
        window = level_count_window(levels, frac, 200)
        assert int(window.contains(levels).sum()) == 200
    with pytest.raises(ConfigError):
        level_count_window(levels, 0.5, 1)


def test_sweep_windows_slide_upward():
    levels = np.sort(np.random.default_rng(4).normal(0.0, 3.0, 1200))
    windows = sweep_windows(levels, count=300, n_windows=3)
    centers = [w.center for w in windows]
    assert centers == sorted(centers)
    assert int(windows[-1].contains(levels[-1])) == 1  # border window reaches the top
    with pytest.raises(ConfigError):
        sweep_windows(levels, count=300, n_windows=0)


def test_density_shaping_compensates_level_density():
    """Weights are damped where levels crowd: f = rho/nu."""
    spectra = compute_spectra(ModelParams(6, 6, 0.5))
    dos = density_of_states(spectra, selection="1").fit
    window = EnergyWindow(dos.mean, 2.0)
    table = select_levels(spectra, "1", window)
    ens = sample_ensemble(table, dos, seed=0)
    dense_slot = np.argmax(dos(table.slot_energies))
    sparse_slot = np.argmin(dos(table.slot_energies))
    assert ens.shaping[dense_slot] < ens.shaping[sparse_slot]
