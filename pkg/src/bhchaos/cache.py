"""On-disk spectrum cache keyed by (L, N, u).

The root directory comes from the BHCHAOS_CACHE environment variable and
falls back to ~/.cache/bhchaos.  Entries are the persistence format of
spectra.save_spectra; a manifest whose parameters do not match the request
exactly is treated as a miss and rebuilt.
"""

from __future__ import annotations

import os
from pathlib import Path

from .errors import CacheError
from .hamiltonian import ModelParams
from .spectra import SpectrumSet, compute_spectra, load_spectra, save_spectra

ENV_VAR = "BHCHAOS_CACHE"


def cache_root() -> Path:
    root = os.environ.get(ENV_VAR)
    if root:
        return Path(root)
    return Path.home() / ".cache" / "bhchaos"


def entry_path(params: ModelParams, root: Path | None = None) -> Path:
    return (root or cache_root()) / params.label()


def load_or_compute(
    params: ModelParams,
    threads: int = 1,
    root: Path | None = None,
    force: bool = False,
) -> tuple[SpectrumSet, bool]:
    """Return (spectra, cache_hit); computes and stores on a miss.

    Corrupt entries raise CacheError rather than being silently rebuilt, so
    damage is visible; delete the entry directory (or pass force=True) to
    rebuild.
    """
    path = entry_path(params, root)
    if not force and (path / "manifest.json").exists():
        spectra = load_spectra(path)  # may raise CacheError subclasses
        got = spectra.params
        if (got.L, got.N, got.u) != (params.L, params.N, params.u):
            raise CacheError(
                f"cache entry {path} holds {got.label()}, expected {params.label()}"
            )
        return spectra, True
    spectra = compute_spectra(params, threads=threads)
    save_spectra(spectra, path)
    return spectra, False
