"""Block diagonalization, density of states, and spectrum persistence.

A SpectrumSet is the product of diagonalizing every symmetry block of one
(L, N, u) model: ascending eigenvalues per block plus the structural
degeneracy map.  Only eigenvalues are kept; the downstream random-state
ensembles are defined directly in the energy eigenbasis, so eigenvectors are
never needed.

Spectra persist as one raw little-endian float64 file per block next to a
JSON manifest carrying dimensions and SHA-256 checksums.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .basis import BasisIndex, enumerate_basis
from .errors import CacheChecksumError, CacheVersionError, ConfigError, NumericalError
from .hamiltonian import DENSE_DIM_CAP, BlockMatrix, ModelParams, build_block_matrix
from .symmetry import DegeneracyMap, SymmetryBlock, build_blocks

FORMAT_VERSION = 1


@dataclass(frozen=True)
class BlockSpectrum:
    """Ascending eigenvalues of one symmetry block."""

    j: int
    parity: str | None
    eigenvalues: np.ndarray

    @property
    def key(self) -> str:
        return f"{self.j}" if self.parity is None else f"{self.j}-{self.parity}"

    @property
    def dim(self) -> int:
        return len(self.eigenvalues)


@dataclass(frozen=True)
class SpectrumSet:
    """All block spectra of one model, with degeneracy structure attached."""

    params: ModelParams
    blocks: tuple[BlockSpectrum, ...]
    degeneracy: DegeneracyMap
    metadata: dict = field(default_factory=dict)

    @property
    def total_levels(self) -> int:
        return sum(b.dim for b in self.blocks)

    def block_index(self, key: str) -> int:
        for i, b in enumerate(self.blocks):
            if b.key == key:
                return i
        raise ConfigError(f"no block named {key!r}; available: {[b.key for b in self.blocks]}")

    def block(self, key: str) -> BlockSpectrum:
        return self.blocks[self.block_index(key)]


def diagonalize(matrix: BlockMatrix) -> BlockSpectrum:
    """Full ascending spectrum of one block (eigenvalues only)."""
    if matrix.dim == 0:
        return BlockSpectrum(matrix.block.j, matrix.block.parity, np.empty(0))
    try:
        vals = np.linalg.eigvalsh(matrix.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed on block {matrix.block.key}: {exc}") from exc
    return BlockSpectrum(matrix.block.j, matrix.block.parity, vals)


def compute_spectra(
    params: ModelParams, threads: int = 1, dense_cap: int = DENSE_DIM_CAP
) -> SpectrumSet:
    """Build and diagonalize every symmetry block of the model.

    Blocks are independent; with threads > 1 they are assembled and
    diagonalized concurrently (LAPACK releases the GIL).  The result order is
    fixed by the sector order regardless of thread timing.
    """
    basis = enumerate_basis(params.L, params.N)
    blocks, degmap, table = build_blocks(basis)

    def run(block: SymmetryBlock) -> BlockSpectrum:
        return diagonalize(build_block_matrix(params, basis, table, block, dense_cap=dense_cap))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            spectra = tuple(pool.map(run, blocks))
    else:
        spectra = tuple(run(b) for b in blocks)
    meta = {
        "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "code_version": __version__,
    }
    return SpectrumSet(params=params, blocks=spectra, degeneracy=degmap, metadata=meta)


# ---------------------------------------------------------------------------
# block selections

def resolve_selection(spectra: SpectrumSet, selection) -> list[int]:
    """Translate a block selection into block indices.

    Accepts "all", "one-per-group", a single key like "1" or "9-even"
    (also "9e"/"9o"), or an iterable of keys.
    """
    if isinstance(selection, str):
        token = selection.strip().lower()
        if token == "all":
            return list(range(len(spectra.blocks)))
        if token in ("one-per-group", "one-per-degeneracy-group"):
            return spectra.degeneracy.canonical_indices()
        return [_block_index(spectra, token)]
    if isinstance(selection, int):
        return [_block_index(spectra, str(selection))]
    indices = [_block_index(spectra, str(tok).strip().lower()) for tok in selection]
    if len(set(indices)) != len(indices):
        raise ConfigError(f"duplicate blocks in selection {selection!r}")
    return indices


def _block_index(spectra: SpectrumSet, token: str) -> int:
    token = token.replace("_", "-")
    if token.endswith("e") and not token.endswith("-even") and token[:-1].isdigit():
        token = token[:-1] + "-even"
    if token.endswith("o") and not token.endswith("-odd") and token[:-1].isdigit():
        token = token[:-1] + "-odd"
    return spectra.block_index(token)


# ---------------------------------------------------------------------------
# density of states

@dataclass(frozen=True)
class GaussianDos:
    """Smooth level density: amplitude * normal pdf, integrating to amplitude."""

    amplitude: float
    mean: float
    std: float

    def __call__(self, energy):
        x = (np.asarray(energy, dtype=float) - self.mean) / self.std
        return self.amplitude * np.exp(-0.5 * x * x) / (self.std * np.sqrt(2.0 * np.pi))


@dataclass(frozen=True)
class DosHistogram:
    """Binned level counts, exposed as a density (counts per unit energy)."""

    edges: np.ndarray
    counts: np.ndarray

    @property
    def density(self) -> np.ndarray:
        return self.counts / np.diff(self.edges)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


@dataclass(frozen=True)
class DosResult:
    histogram: DosHistogram
    fit: GaussianDos


def gaussian_fit(levels: np.ndarray) -> GaussianDos:
    """Moment-matched Gaussian density: sample mean/std, amplitude = count."""
    levels = np.asarray(levels, dtype=float)
    if levels.size < 2:
        raise NumericalError("need at least two levels to fit a density")
    std = float(levels.std())
    if std == 0.0:
        raise NumericalError("degenerate density fit: zero level variance")
    return GaussianDos(amplitude=float(levels.size), mean=float(levels.mean()), std=std)


def gaussian_fit_least_squares(levels: np.ndarray, bins: int = 60) -> GaussianDos:
    """Alternative fit: least squares of a Gaussian on the binned density."""
    from scipy.optimize import curve_fit

    levels = np.asarray(levels, dtype=float)
    start = gaussian_fit(levels)  # also validates the input
    counts, edges = np.histogram(levels, bins=bins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    dens = counts / np.diff(edges)

    def model(e, amp, mu, s):
        return amp * np.exp(-0.5 * ((e - mu) / s) ** 2) / (s * np.sqrt(2 * np.pi))

    popt, _ = curve_fit(model, centers, dens, p0=[start.amplitude, start.mean, start.std])
    return GaussianDos(amplitude=float(popt[0]), mean=float(popt[1]), std=float(abs(popt[2])))


def density_of_states(
    spectra: SpectrumSet, bins: int = 60, selection="all", method: str = "moments"
) -> DosResult:
    """Histogram plus Gaussian fit of the selected blocks' pooled levels.

    The pool is the plain union of the selected blocks' spectra, so selecting
    every block yields the degeneracy-complete level multiset of the model.
    """
    if bins < 2:
        raise ConfigError(f"need at least 2 bins, got {bins}")
    levels = selection_levels(spectra, selection)
    counts, edges = np.histogram(levels, bins=bins)
    if method == "moments":
        fit = gaussian_fit(levels)
    elif method == "least-squares":
        fit = gaussian_fit_least_squares(levels, bins=bins)
    else:
        raise ConfigError(f"unknown density fit method {method!r}")
    return DosResult(histogram=DosHistogram(edges=edges, counts=counts.astype(float)), fit=fit)


def selection_levels(spectra: SpectrumSet, selection) -> np.ndarray:
    """Sorted pooled eigenvalues of the selected blocks."""
    indices = resolve_selection(spectra, selection)
    pooled = np.concatenate([spectra.blocks[i].eigenvalues for i in indices])
    return np.sort(pooled)


# ---------------------------------------------------------------------------
# persistence

def _checksum(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def save_spectra(spectra: SpectrumSet, path) -> None:
    """Write one raw float64 file per block plus a JSON manifest."""
    from pathlib import Path

    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    manifest = {
        "format_version": FORMAT_VERSION,
        "L": spectra.params.L,
        "N": spectra.params.N,
        "u": spectra.params.u,
        "metadata": spectra.metadata,
        "degeneracy_groups": [list(g) for g in spectra.degeneracy.groups],
        "blocks": [],
    }
    for b in spectra.blocks:
        payload = np.ascontiguousarray(b.eigenvalues, dtype="<f8").tobytes()
        fname = f"block_{b.key}.bin"
        (root / fname).write_bytes(payload)
        manifest["blocks"].append(
            {
                "j": b.j,
                "parity": b.parity,
                "dim": b.dim,
                "file": fname,
                "checksum": _checksum(payload),
            }
        )
    (root / "manifest.json").write_text(json.dumps(manifest, indent=2))


def load_spectra(path) -> SpectrumSet:
    """Inverse of save_spectra; verifies format version and checksums."""
    from pathlib import Path

    root = Path(path)
    manifest = json.loads((root / "manifest.json").read_text())
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise CacheVersionError(
            f"spectrum store at {root} has format version {version}, expected {FORMAT_VERSION}"
        )
    blocks = []
    for entry in manifest["blocks"]:
        payload = (root / entry["file"]).read_bytes()
        if _checksum(payload) != entry["checksum"]:
            raise CacheChecksumError(f"checksum mismatch in {root / entry['file']}")
        vals = np.frombuffer(payload, dtype="<f8")
        if len(vals) != entry["dim"]:
            raise CacheChecksumError(
                f"{root / entry['file']}: expected {entry['dim']} eigenvalues, found {len(vals)}"
            )
        blocks.append(BlockSpectrum(j=entry["j"], parity=entry["parity"], eigenvalues=vals))
    params = ModelParams(L=manifest["L"], N=manifest["N"], u=manifest["u"])
    degmap = DegeneracyMap(groups=tuple(tuple(g) for g in manifest["degeneracy_groups"]))
    return SpectrumSet(
        params=params, blocks=tuple(blocks), degeneracy=degmap, metadata=manifest.get("metadata", {})
    )
