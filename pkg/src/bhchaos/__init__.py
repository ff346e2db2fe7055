"""Quantum-chaos diagnostics for the periodic Bose-Hubbard model."""

__version__ = "0.1.0"

from .basis import BasisIndex, FockState, apply_hop, enumerate_basis, interaction_energy
from .errors import (
    BhchaosError,
    CacheChecksumError,
    CacheError,
    CacheVersionError,
    ConfigError,
    NumericalError,
    UnfoldingError,
)
from .hamiltonian import BlockMatrix, ModelParams, build_block_matrix, build_full_sparse
from .symmetry import (
    DegeneracyMap,
    Orbit,
    OrbitTable,
    SymmetryBlock,
    build_blocks,
    build_orbits,
    cyclic_shift,
    momentum_normalization,
    reflect,
)

__all__ = [
    "BasisIndex",
    "BhchaosError",
    "BlockMatrix",
    "CacheChecksumError",
    "CacheError",
    "CacheVersionError",
    "ConfigError",
    "DegeneracyMap",
    "FockState",
    "ModelParams",
    "NumericalError",
    "Orbit",
    "OrbitTable",
    "SymmetryBlock",
    "UnfoldingError",
    "apply_hop",
    "build_block_matrix",
    "build_blocks",
    "build_full_sparse",
    "build_orbits",
    "cyclic_shift",
    "enumerate_basis",
    "interaction_energy",
    "momentum_normalization",
    "reflect",
]
