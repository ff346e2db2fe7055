"""Fock basis for N spinless bosons on an L-site ring.

States are occupation vectors (n_0, ..., n_{L-1}) with sum(n) = N, stored as
tuples of ints and indexed in a fixed canonical order: lexicographically
descending, so (N, 0, ..., 0) gets index 0.  The dimension of the fixed-N
sector is C(N+L-1, N).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import ConfigError

FockState = tuple[int, ...]

MAX_BOSONS = 255  # occupations are assumed to fit in a byte
_INDEX_LIMIT = 2**63 - 1


def sector_dimension(L: int, N: int) -> int:
    """Number of Fock states with N bosons on L sites, C(N+L-1, N)."""
    return comb(N + L - 1, N)


def _states_descending(L: int, N: int) -> list[FockState]:
    # Recursive generation already yields lexicographically descending order:
    # highest occupation on the first site first.
    if L == 1:
        return [(N,)]
    out: list[FockState] = []
    for n0 in range(N, -1, -1):
        out.extend((n0,) + tail for tail in _states_descending(L - 1, N - n0))
    return out


@dataclass(frozen=True)
class BasisIndex:
    """Bijection between the canonically ordered Fock states and 0..D-1."""

    L: int
    N: int
    states: tuple[FockState, ...]
    index: dict[FockState, int] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    def state_of(self, i: int) -> FockState:
        return self.states[i]

    def index_of(self, state: FockState) -> int:
        return self.index[tuple(state)]

    def occupations(self) -> np.ndarray:
        """All states as a (D, L) uint8 array, in canonical order."""
        return np.array(self.states, dtype=np.uint8)


def enumerate_basis(L: int, N: int) -> BasisIndex:
    """Enumerate the fixed-N Fock basis in canonical (descending) order.

    Raises ConfigError for L < 1, N < 0, occupations beyond the supported
    byte range, or dimensions that overflow a signed 64-bit index.
    """
    if L < 1:
        raise ConfigError(f"need at least one site, got L={L}")
    if N < 0:
        raise ConfigError(f"boson count must be non-negative, got N={N}")
    if N > MAX_BOSONS:
        raise ConfigError(f"boson count {N} exceeds supported maximum {MAX_BOSONS}")
    dim = sector_dimension(L, N)
    if dim > _INDEX_LIMIT:
        raise ConfigError(f"basis dimension {dim} overflows 64-bit indexing")
    states = tuple(_states_descending(L, N))
    return BasisIndex(L=L, N=N, states=states, index={s: i for i, s in enumerate(states)})


class EmptySourceSite(ValueError):
    """Hop requested from a site with no bosons; the caller skips the term."""


def apply_hop(state: FockState, src: int, dst: int) -> tuple[FockState, float]:
    """Move one boson src -> dst and return (new state, amplitude).

    The amplitude is the bosonic ladder factor sqrt(n_src * (n_dst + 1)).
    Site indices wrap modulo L (periodic ring).
    """
    L = len(state)
    src %= L
    dst %= L
    n_src = state[src]
    if n_src == 0:
        raise EmptySourceSite(f"no boson to move from site {src} of {state}")
    if src == dst:
        return state, float(n_src)
    new = list(state)
    new[src] -= 1
    amp = np.sqrt(n_src * (new[dst] + 1))
    new[dst] += 1
    return tuple(new), float(amp)


def interaction_energy(state: FockState, U: float) -> float:
    """On-site pair interaction (U/2) * sum_l n_l (n_l - 1)."""
    return 0.5 * U * sum(n * (n - 1) for n in state)
