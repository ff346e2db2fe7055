import json

import numpy as np
import pytest
from scipy.integrate import quad

from bhchaos.basis import enumerate_basis
from bhchaos.errors import (
    CacheChecksumError,
    CacheError,
    CacheVersionError,
    ConfigError,
    NumericalError,
)
from bhchaos.hamiltonian import BlockMatrix, ModelParams, build_block_matrix, build_full_sparse
from bhchaos.cache import load_or_compute
from bhchaos.spectra import (
    compute_spectra,
    density_of_states,
    diagonalize,
    gaussian_fit,
    gaussian_fit_least_squares,
    load_spectra,
    resolve_selection,
    save_spectra,
    selection_levels,
)
from bhchaos.symmetry import SymmetryBlock, build_blocks


def small_spectra(L=5, N=4, u=0.5):
    return compute_spectra(ModelParams(L, N, u))


def test_diagonalize_scalar():
    block = SymmetryBlock(j=1, parity=None, orbit_ids=(0,), dim=1)
    spectrum = diagonalize(BlockMatrix(block=block, entries=np.array([[2.5]])))
    assert spectrum.eigenvalues.tolist() == [2.5]
    assert spectrum.key == "1"


def test_interaction_only_spectrum_is_diagonal_multiset():
    params = ModelParams(4, 3, 1.0)
    basis = enumerate_basis(4, 3)
    blocks, _, table = build_blocks(basis)
    for b in blocks:
        m = build_block_matrix(params, basis, table, b)
        spectrum = diagonalize(m)
        assert np.allclose(spectrum.eigenvalues, np.sort(np.diag(m.entries).real))


def test_block_union_equals_oracle_spectrum():
    params = ModelParams(4, 4, 0.5)
    spectra = compute_spectra(params)
    basis = enumerate_basis(4, 4)
    union = np.sort(np.concatenate([b.eigenvalues for b in spectra.blocks]))
    full = np.linalg.eigvalsh(build_full_sparse(params, basis).toarray())
    assert np.abs(union - full).max() < 1e-10
    assert spectra.total_levels == 35


def test_compute_spectra_threaded_matches_serial():
    serial = compute_spectra(ModelParams(5, 4, 0.5), threads=1)
    threaded = compute_spectra(ModelParams(5, 4, 0.5), threads=4)
    for a, b in zip(serial.blocks, threaded.blocks):
        assert a.key == b.key
        assert np.array_equal(a.eigenvalues, b.eigenvalues)


def test_gaussian_fit_moments_and_integral():
    rng = np.random.default_rng(3)
    levels = rng.normal(1.5, 0.7, size=4000)
    fit = gaussian_fit(levels)
    assert fit.mean == pytest.approx(levels.mean())
    assert fit.std == pytest.approx(levels.std())
    integral, _ = quad(fit, fit.mean - 10 * fit.std, fit.mean + 10 * fit.std)
    assert integral == pytest.approx(fit.amplitude, rel=1e-6)


def test_gaussian_fit_least_squares_close_to_moments():
    rng = np.random.default_rng(4)
    levels = rng.normal(0.0, 2.0, size=20000)
    mom = gaussian_fit(levels)
    lsq = gaussian_fit_least_squares(levels, bins=80)
    assert lsq.mean == pytest.approx(mom.mean, abs=0.1)
    assert lsq.std == pytest.approx(mom.std, rel=0.05)


def test_degenerate_fit_rejected():
    with pytest.raises(NumericalError):
        gaussian_fit(np.full(100, 2.0))


def test_density_of_states_rejects_few_bins():
    with pytest.raises(ConfigError):
        density_of_states(small_spectra(), bins=1)


def test_density_histogram_counts():
    spectra = small_spectra()
    dos = density_of_states(spectra, bins=20)
    assert dos.histogram.counts.sum() == spectra.total_levels
    assert dos.fit.amplitude == spectra.total_levels


def test_resolve_selection():
    spectra = small_spectra()
    assert resolve_selection(spectra, "all") == list(range(6))
    one_per = resolve_selection(spectra, "one-per-group")
    assert [spectra.blocks[i].key for i in one_per] == ["1", "2", "5-even", "5-odd"]
    assert resolve_selection(spectra, "5e") == [spectra.block_index("5-even")]
    assert resolve_selection(spectra, "5o") == [spectra.block_index("5-odd")]
    assert resolve_selection(spectra, ["1", "4"]) == [0, 3]
    with pytest.raises(ConfigError):
        resolve_selection(spectra, "7")
    with pytest.raises(ConfigError):
        resolve_selection(spectra, ["1", "1"])


def test_selection_levels_sorted():
    spectra = small_spectra()
    pooled = selection_levels(spectra, ["1", "2"])
    assert len(pooled) == spectra.block("1").dim + spectra.block("2").dim
    assert np.all(np.diff(pooled) >= 0)


def test_save_load_round_trip(tmp_path):
    spectra = small_spectra()
    save_spectra(spectra, tmp_path / "store")
    loaded = load_spectra(tmp_path / "store")
    assert loaded.params == spectra.params
    assert loaded.degeneracy.groups == spectra.degeneracy.groups
    for a, b in zip(spectra.blocks, loaded.blocks):
        assert a.key == b.key
        assert a.eigenvalues.tobytes() == b.eigenvalues.tobytes()
    manifest = json.loads((tmp_path / "store" / "manifest.json").read_text())
    assert len(manifest["blocks"]) == 6


def test_load_detects_corruption(tmp_path):
    spectra = small_spectra()
    save_spectra(spectra, tmp_path / "store")
    victim = tmp_path / "store" / "block_1.bin"
    victim.write_bytes(victim.read_bytes()[:-8])
    with pytest.raises(CacheChecksumError):
        load_spectra(tmp_path / "store")


def test_load_detects_version_mismatch(tmp_path):
    spectra = small_spectra()
    save_spectra(spectra, tmp_path / "store")
    manifest_path = tmp_path / "store" / "manifest.json"
    manifest = json.loads(manifest_path.read_text())
    manifest["format_version"] = 999
    manifest_path.write_text(json.dumps(manifest))
    with pytest.raises(CacheVersionError):
        load_spectra(tmp_path / "store")


def test_cache_miss_then_hit(tmp_path):
    params = ModelParams(4, 3, 0.5)
    first, hit1 = load_or_compute(params, root=tmp_path)
    second, hit2 = load_or_compute(params, root=tmp_path)
    assert (hit1, hit2) == (False, True)
    for a, b in zip(first.blocks, second.blocks):
        assert a.eigenvalues.tobytes() == b.eigenvalues.tobytes()


def test_cache_entry_param_mismatch(tmp_path):
    params = ModelParams(4, 3, 0.5)
    load_or_compute(params, root=tmp_path)
    entry = tmp_path / params.label()
    imposter = tmp_path / ModelParams(4, 3, 0.25).label()
    entry.rename(imposter)
    with pytest.raises(CacheError):
        load_or_compute(ModelParams(4, 3, 0.25), root=tmp_path)


def test_cache_force_recompute(tmp_path):
    params = ModelParams(4, 3, 0.5)
    load_or_compute(params, root=tmp_path)
    _, hit = load_or_compute(params, root=tmp_path, force=True)
    assert hit is False
