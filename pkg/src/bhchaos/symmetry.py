"""Translation and reflection symmetry of the Bose-Hubbard ring.

The cyclic shift operator maps (n_1, ..., n_L) -> (n_L, n_1, ..., n_{L-1});
its eigenvalues are exp(i * 2*pi*j/L) for sectors j = 1..L.  Reflection
(site-order reversal) commutes with the Hamiltonian but not with the shift,
which forces sectors j and L-j to share a spectrum.  Sectors with real shift
eigenvalue (j = L, and j = L/2 for even L) are additionally split into even
and odd reflection blocks.

The momentum-adapted basis vector built on an orbit with period R is

    (1/sqrt(R)) * sum_{r=0}^{R-1} exp(-i*kappa_j*r) S^r |rep>,

which is compatible with sector j iff j*R = 0 (mod L).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .basis import BasisIndex, FockState
from .errors import ConfigError


def cyclic_shift(state: FockState) -> FockState:
    """One step of the ring translation: last site moves to the front."""
    return state[-1:] + state[:-1]


def reflect(state: FockState) -> FockState:
    """Site-order reversal."""
    return state[::-1]


@dataclass(frozen=True)
class Orbit:
    """A translation orbit: the distinct cyclic shifts of one Fock state."""

    orbit_id: int
    representative: FockState
    period: int            # smallest R > 0 with S^R |rep> = |rep>; divides L
    member_indices: tuple[int, ...]  # basis index of S^r |rep> for r = 0..R-1


@dataclass(frozen=True)
class OrbitTable:
    """All orbits plus the inverse map basis-index -> (orbit, shift).

    For every Fock state i, state_i = S^(shift_of[i]) |rep of orbit_of[i]>.
    Representatives are the first-visited (canonically smallest-index) member
    of each orbit, which makes the decomposition deterministic.
    """

    L: int
    N: int
    orbits: tuple[Orbit, ...]
    orbit_of: np.ndarray   # (D,) int32
    shift_of: np.ndarray   # (D,) int16


def build_orbits(basis: BasisIndex) -> OrbitTable:
    L = basis.L
    D = basis.dim
    orbit_of = np.full(D, -1, dtype=np.int32)
    shift_of = np.zeros(D, dtype=np.int16)
    orbits: list[Orbit] = []
    for i in range(D):
        if orbit_of[i] >= 0:
            continue
        rep = basis.state_of(i)
        members = [i]
        orbit_of[i] = len(orbits)
        state = cyclic_shift(rep)
        r = 1
        while state != rep:
            k = basis.index_of(state)
            orbit_of[k] = len(orbits)
            shift_of[k] = r
            members.append(k)
            state = cyclic_shift(state)
            r += 1
        orbits.append(Orbit(len(orbits), rep, r, tuple(members)))
    return OrbitTable(L=L, N=basis.N, orbits=tuple(orbits), orbit_of=orbit_of, shift_of=shift_of)


def momentum_normalization(orbit: Orbit, j: int, L: int) -> float:
    """Normalization sqrt(R) of the momentum-adapted vector on this orbit.

    Rejects incompatible (orbit, sector) pairs, i.e. j*R != 0 (mod L).
    """
    if (j * orbit.period) % L != 0:
        raise ConfigError(
            f"orbit with period {orbit.period} is incompatible with sector j={j} (L={L})"
        )
    return float(np.sqrt(orbit.period))


@dataclass(frozen=True)
class ParityColumn:
    """One reflection-adapted basis vector inside a kappa in {0, pi} sector.

    Expressed over momentum-basis rows: either a single self-paired orbit row
    (coefficient 1) or a pair of rows with coefficients (1, sign*phase)/sqrt(2).
    """

    row_a: int
    row_b: int | None
    phase: float  # reflection phase linking the paired rows; +/-1


@dataclass(frozen=True)
class SymmetryBlock:
    """One invariant subspace: a momentum sector, optionally parity-resolved."""

    j: int
    parity: str | None               # None, "even" or "odd"
    orbit_ids: tuple[int, ...]       # momentum-basis rows (compatible orbits)
    dim: int
    parity_columns: tuple[ParityColumn, ...] | None = None

    @property
    def key(self) -> str:
        return f"{self.j}" if self.parity is None else f"{self.j}-{self.parity}"

    def basis_entries(self, table: OrbitTable) -> list[tuple[Orbit, float]]:
        """(orbit, normalization) pairs of the underlying momentum basis."""
        return [
            (table.orbits[o], momentum_normalization(table.orbits[o], self.j, table.L))
            for o in self.orbit_ids
        ]


@dataclass(frozen=True)
class DegeneracyMap:
    """Partition of block indices into groups with identical spectra.

    Conjugate momentum sectors {j, L-j} form size-2 groups; self-conjugate
    blocks (parity-resolved sectors included) are singletons.  The group size
    is the structural degeneracy multiplicity of every level in the group.
    """

    groups: tuple[tuple[int, ...], ...]

    def multiplicity(self, group: tuple[int, ...]) -> int:
        return len(group)

    def group_of(self, block_index: int) -> tuple[int, ...]:
        for g in self.groups:
            if block_index in g:
                return g
        raise KeyError(block_index)

    def canonical_indices(self) -> list[int]:
        """One block index per group (the lowest index)."""
        return [min(g) for g in self.groups]


def _parity_split(
    basis: BasisIndex, table: OrbitTable, j: int, compatible: list[int]
) -> tuple[SymmetryBlock, SymmetryBlock]:
    """Split a kappa in {0, pi} momentum sector into even/odd reflection blocks.

    Reflection maps the momentum vector on orbit o to phase * (vector on the
    reflected orbit o'), with phase = exp(-i*kappa*r0) = +/-1 where the
    reflected representative equals S^r0 applied to the representative of o'.
    Paired orbits yield one even and one odd combination; self-paired orbits
    go wholly to the block matching their reflection phase (always even at
    kappa = 0, either sign at kappa = pi).
    """
    L = table.L
    basis_row = {o: row for row, o in enumerate(compatible)}
    even: list[ParityColumn] = []
    odd: list[ParityColumn] = []
    seen: set[int] = set()
    for row, o in enumerate(compatible):
        if o in seen:
            continue
        orbit = table.orbits[o]
        idx = basis.index_of(reflect(orbit.representative))
        k = int(table.orbit_of[idx])
        r0 = int(table.shift_of[idx])
        phase = 1.0 if (2 * j * r0) % (2 * L) == 0 else -1.0  # exp(-i*kappa_j*r0)
        seen.add(o)
        if k == o:
            col = ParityColumn(row_a=row, row_b=None, phase=phase)
            (even if phase > 0 else odd).append(col)
        else:
            seen.add(k)
            even.append(ParityColumn(row_a=row, row_b=basis_row[k], phase=phase))
            odd.append(ParityColumn(row_a=row, row_b=basis_row[k], phase=-phase))
    blocks = []
    for name, cols in (("even", even), ("odd", odd)):
        blocks.append(
            SymmetryBlock(
                j=j,
                parity=name,
                orbit_ids=tuple(compatible),
                dim=len(cols),
                parity_columns=tuple(cols),
            )
        )
    return blocks[0], blocks[1]


def build_blocks(basis: BasisIndex) -> tuple[list[SymmetryBlock], DegeneracyMap, OrbitTable]:
    """Decompose the basis into momentum sectors and parity sub-blocks.

    Returns the blocks in sector order (j = 1..L, with the real-eigenvalue
    sectors replaced by their even/odd pair), the degeneracy map linking
    conjugate sectors, and the orbit table used to build everything.
    """
    L = basis.L
    table = build_orbits(basis)
    compatible: dict[int, list[int]] = {j: [] for j in range(1, L + 1)}
    for orbit in table.orbits:
        for j in range(1, L + 1):
            if (j * orbit.period) % L == 0:
                compatible[j].append(orbit.orbit_id)

    real_sectors = {L} | ({L // 2} if L % 2 == 0 else set())
    blocks: list[SymmetryBlock] = []
    position: dict[tuple[int, str | None], int] = {}
    for j in range(1, L + 1):
        if j in real_sectors:
            ev, od = _parity_split(basis, table, j, compatible[j])
            for b in (ev, od):
                position[(j, b.parity)] = len(blocks)
                blocks.append(b)
        else:
            position[(j, None)] = len(blocks)
            blocks.append(
                SymmetryBlock(j=j, parity=None, orbit_ids=tuple(compatible[j]), dim=len(compatible[j]))
            )

    groups: list[tuple[int, ...]] = []
    for j in range(1, L + 1):
        if j in real_sectors:
            groups.append((position[(j, "even")],))
            groups.append((position[(j, "odd")],))
        elif j < L - j:
            groups.append((position[(j, None)], position[(L - j, None)]))
        # j > L-j handled by its partner; j == L-j is a real sector
    return blocks, DegeneracyMap(groups=tuple(groups)), table
