import numpy as np
import pytest

from bhchaos.basis import enumerate_basis, interaction_energy
from bhchaos.errors import ConfigError
from bhchaos.hamiltonian import (
    ModelParams,
    build_block_matrix,
    build_full_sparse,
    interaction_trace,
)
from bhchaos.symmetry import build_blocks


def kron_oracle_spectrum(L, N, u):
    """Independent construction: tensor-product ladder operators on the full
    (N+1)^L space, projected onto the fixed-N sector."""
    cut = N + 1
    a = np.diag(np.sqrt(np.arange(1, cut)), k=1)
    eye = np.eye(cut)

    def site_op(op, site):
        mats = [eye] * L
        mats[site] = op
        out = np.array([[1.0]])
        for m in mats:
            out = np.kron(out, m)
        return out

    dim = cut**L
    h = np.zeros((dim, dim))
    J, U = 1.0 - u, u
    for l in range(L):
        ad_next = site_op(a.T, (l + 1) % L)
        a_l = site_op(a, l)
        hop = ad_next @ a_l
        h += -J * (hop + hop.T)
        n_l = site_op(a.T @ a, l)
        h += 0.5 * U * (n_l @ n_l - n_l)
    # fixed-N projection: decode tensor indices as base-(N+1) digits
    digits = [np.array([(i // cut**(L - 1 - s)) % cut for s in range(L)]) for i in range(dim)]
    keep = [i for i, d in enumerate(digits) if d.sum() == N]
    return np.sort(np.linalg.eigvalsh(h[np.ix_(keep, keep)]))


@pytest.mark.parametrize("u", [0.0, 0.5, 1.0])
def test_full_sparse_matches_independent_tensor_construction(u):
    basis = enumerate_basis(3, 2)
    ours = np.sort(np.linalg.eigvalsh(build_full_sparse(ModelParams(3, 2, u), basis).toarray()))
    assert np.allclose(ours, kron_oracle_spectrum(3, 2, u), atol=1e-10)


def test_model_params():
    p = ModelParams(9, 9, 0.3)
    assert p.J + p.U == pytest.approx(1.0)
    with pytest.raises(ConfigError):
        ModelParams(9, 9, 1.5)
    with pytest.raises(ConfigError):
        ModelParams(0, 9, 0.5)


def test_full_sparse_trace_and_symmetry():
    basis = enumerate_basis(2, 2)
    h = build_full_sparse(ModelParams(2, 2, 0.5), basis).toarray()
    # (U/2) * sum over states of sum_l n(n-1) = 0.25 * (2 + 0 + 2)
    assert np.trace(h) == pytest.approx(1.0)
    assert np.array_equal(h, h.T)


def test_hopping_traceless():
    basis = enumerate_basis(4, 3)
    h = build_full_sparse(ModelParams(4, 3, 0.0), basis)
    assert h.diagonal().sum() == 0.0


@pytest.mark.parametrize("L,N", [(4, 4), (5, 4), (6, 5)])
def test_block_trace_identity(L, N):
    params = ModelParams(L, N, 0.37)
    basis = enumerate_basis(L, N)
    blocks, _, table = build_blocks(basis)
    total = sum(
        np.trace(build_block_matrix(params, basis, table, b).entries).real for b in blocks
    )
    expected = interaction_trace(params, basis)
    assert total == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("L,N", [(4, 4), (5, 4)])
def test_block_union_matches_full_space(L, N):
    params = ModelParams(L, N, 0.5)
    basis = enumerate_basis(L, N)
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
    assert np.abs(union - full).max() < 1e-10


def test_blocks_hermitian_and_real_sectors_real():
    params = ModelParams(4, 4, 0.5)
    basis = enumerate_basis(4, 4)
    blocks, _, table = build_blocks(basis)
    for b in blocks:
        m = build_block_matrix(params, basis, table, b).entries
        assert np.allclose(m, m.conj().T, atol=1e-12)
        if (2 * b.j) % 4 == 0:
            assert m.dtype == np.float64


def test_conjugate_pair_matrices():
    params = ModelParams(5, 4, 0.5)
    basis = enumerate_basis(5, 4)
    blocks, _, table = build_blocks(basis)
    by_key = {b.key: b for b in blocks}
    m1 = build_block_matrix(params, basis, table, by_key["1"]).entries
    m4 = build_block_matrix(params, basis, table, by_key["4"]).entries
    assert by_key["1"].orbit_ids == by_key["4"].orbit_ids
    assert np.allclose(m1, m4.conj(), atol=1e-12)


def test_interaction_only_blocks_are_diagonal():
    """At u = 1 hopping vanishes; block spectra are orbit interaction energies."""
    params = ModelParams(4, 4, 1.0)
    basis = enumerate_basis(4, 4)
    blocks, _, table = build_blocks(basis)
    diag_union = []
    for b in blocks:
        m = build_block_matrix(params, basis, table, b).entries
        assert np.abs(m - np.diag(np.diag(m))).max() == 0.0
        diag_union.extend(np.diag(m).real)
    per_state = sorted(interaction_energy(s, 1.0) for s in basis.states)
    assert np.allclose(np.sort(diag_union), per_state, atol=1e-12)


def test_hot_orbit_diagonal_at_full_scale():
    """The maximally stacked orbit's diagonal is purely interaction energy."""
    params = ModelParams(9, 9, 0.5)
    basis = enumerate_basis(9, 9)
    blocks, _, table = build_blocks(basis)
    j1 = next(b for b in blocks if b.key == "1")
    m = build_block_matrix(params, basis, table, j1)
    assert table.orbits[j1.orbit_ids[0]].representative == (9, 0, 0, 0, 0, 0, 0, 0, 0)
    assert m.entries[0, 0] == pytest.approx(18.0, abs=1e-12)


def test_dense_cap_guard():
    params = ModelParams(4, 4, 0.5)
    basis = enumerate_basis(4, 4)
    blocks, _, table = build_blocks(basis)
    big = max(blocks, key=lambda b: b.dim)
    with pytest.raises(ConfigError):
        build_block_matrix(params, basis, table, big, dense_cap=2)


def test_full_sparse_cap_guard():
    basis = enumerate_basis(9, 9)
    with pytest.raises(ConfigError):
        build_full_sparse(ModelParams(9, 9, 0.5), basis)
