"""Bose-Hubbard Hamiltonian on a ring, assembled inside symmetry blocks.

The model (hbar = 1) is

    H = -J * sum_l (a+_{l+1} a_l + a+_l a_{l+1}) + (U/2) * sum_l n_l (n_l - 1)

with periodic wrap l = L+1 -> 1 and the one-parameter coupling U = u,
J = 1 - u, u in [0, 1] (integrable at both endpoints).

Momentum-block matrix elements are accumulated column by column: every
hopping term is applied to the source orbit's representative, the resulting
Fock state is located as S^r applied to some representative, and the
amplitude picks up sqrt(R/R') * exp(i*kappa_j*r).  Sectors with real shift
eigenvalue are then rotated into their even/odd reflection sub-blocks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .basis import BasisIndex, interaction_energy
from .errors import ConfigError, NumericalError
from .symmetry import OrbitTable, SymmetryBlock

DENSE_DIM_CAP = 5000


@dataclass(frozen=True)
class ModelParams:
    """Ring size, boson count and the interaction/hopping trade-off u."""

    L: int
    N: int
    u: float

    def __post_init__(self):
        if self.L < 1:
            raise ConfigError(f"need at least one site, got L={self.L}")
        if self.N < 0:
            raise ConfigError(f"boson count must be non-negative, got N={self.N}")
        if not 0.0 <= self.u <= 1.0:
            raise ConfigError(f"coupling u must lie in [0, 1], got u={self.u}")

    @property
    def U(self) -> float:
        return self.u

    @property
    def J(self) -> float:
        return 1.0 - self.u

    def label(self) -> str:
        return f"L{self.L}-N{self.N}-u{self.u:.6f}"


@dataclass(frozen=True)
class BlockMatrix:
    """Dense Hermitian Hamiltonian restricted to one symmetry block."""

    block: SymmetryBlock
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _hop_targets(state, L):
    """Yield (site, neighbor) pairs for both hopping directions."""
    for l in range(L):
        if state[l] > 0:
            yield l, (l + 1) % L
            yield l, (l - 1) % L


def _momentum_matrix(
    params: ModelParams, basis: BasisIndex, table: OrbitTable, orbit_ids, j: int
) -> np.ndarray:
    """Momentum-sector Hamiltonian over the given compatible orbits."""
    L = params.L
    n = len(orbit_ids)
    row_of = {o: r for r, o in enumerate(orbit_ids)}
    periods = np.array([table.orbits[o].period for o in orbit_ids], dtype=float)
    kappa = 2.0 * np.pi * j / L
    phases = np.exp(1j * kappa * np.arange(L))

    h = np.zeros((n, n), dtype=complex)
    for col, o in enumerate(orbit_ids):
        rep = table.orbits[o].representative
        h[col, col] += interaction_energy(rep, params.U)
        if params.J == 0.0:
            continue
        src_period = periods[col]
        for l, m in _hop_targets(rep, L):
            new = list(rep)
            new[l] -= 1
            amp = -params.J * np.sqrt(rep[l] * (new[m] + 1))
            new[m] += 1
            idx = basis.index_of(tuple(new))
            target = int(table.orbit_of[idx])
            row = row_of.get(target)
            if row is None:
                continue  # image lies outside this sector; cancels in aggregate
            r = int(table.shift_of[idx])
            h[row, col] += amp * np.sqrt(src_period / periods[row]) * phases[r]
    # Hermitian by construction up to rounding; keep the lower triangle and mirror.
    h = np.tril(h, -1) + np.tril(h, -1).conj().T + np.diag(h.diagonal().real)
    return h


def _parity_transform(block: SymmetryBlock, n_rows: int) -> np.ndarray:
    """Orthogonal map from the momentum basis onto the parity-adapted one."""
    w = np.zeros((n_rows, block.dim))
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for c, col in enumerate(block.parity_columns):
        if col.row_b is None:
            w[col.row_a, c] = 1.0
        else:
            w[col.row_a, c] = inv_sqrt2
            w[col.row_b, c] = col.phase * inv_sqrt2
    return w


def build_block_matrix(
    params: ModelParams,
    basis: BasisIndex,
    table: OrbitTable,
    block: SymmetryBlock,
    dense_cap: int = DENSE_DIM_CAP,
) -> BlockMatrix:
    """Assemble the dense Hermitian Hamiltonian of one symmetry block.

    Blocks with real shift eigenvalue (parity-resolved or not) come out real;
    generic momentum blocks are complex.  Refuses dimensions above dense_cap.
    """
    if block.dim > dense_cap:
        raise ConfigError(
            f"block {block.key} has dimension {block.dim} above the dense cap {dense_cap}"
        )
    h = _momentum_matrix(params, basis, table, block.orbit_ids, block.j)
    real_sector = (2 * block.j) % params.L == 0  # kappa in {0, pi}
    if real_sector:
        stray = float(np.abs(h.imag).max()) if h.size else 0.0
        if stray > 1e-9:
            raise NumericalError(
                f"block {block.key}: real sector carries imaginary entries up to {stray:.3e}"
            )
        h = h.real.copy()
    if block.parity is not None:
        w = _parity_transform(block, len(block.orbit_ids))
        h = w.T @ h @ w
        h = np.tril(h) + np.tril(h, -1).T
    return BlockMatrix(block=block, entries=h)


def build_full_sparse(
    params: ModelParams, basis: BasisIndex, dim_cap: int = DENSE_DIM_CAP
) -> sp.csr_matrix:
    """Full-space Hamiltonian in the Fock basis (oracle for block assembly).

    Real symmetric, CSR storage.  Refuses dimensions above dim_cap: this path
    exists to cross-check the block construction at small sizes, not to scale.
    """
    D = basis.dim
    if D > dim_cap:
        raise ConfigError(f"full-space dimension {D} exceeds the oracle cap {dim_cap}")
    L = params.L
    rows, cols, vals = [], [], []
    for i in range(D):
        state = basis.state_of(i)
        diag = interaction_energy(state, params.U)
        if diag != 0.0:
            rows.append(i)
            cols.append(i)
            vals.append(diag)
        if params.J == 0.0:
            continue
        for l, m in _hop_targets(state, L):
            new = list(state)
            new[l] -= 1
            amp = -params.J * np.sqrt(state[l] * (new[m] + 1))
            new[m] += 1
            rows.append(basis.index_of(tuple(new)))
            cols.append(i)
            vals.append(amp)
    h = sp.csr_matrix((vals, (rows, cols)), shape=(D, D))
    h.sum_duplicates()
    return h


def interaction_trace(params: ModelParams, basis: BasisIndex) -> float:
    """Trace of H over the full Fock space (hopping is traceless)."""
    return sum(interaction_energy(s, params.U) for s in basis.states)
