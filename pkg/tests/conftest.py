"""Shared fixtures.

Full-scale spectra (L = N = 9) are expensive to diagonalize, so they are
cached on disk and shared session-wide.  The cache root honors
$BHCHAOS_CACHE and falls back to a repo-local directory, keeping repeated
test runs fast.
"""

import os
from pathlib import Path

import pytest

REPO_CACHE = Path(__file__).resolve().parent.parent / ".bhchaos-cache"
os.environ.setdefault("BHCHAOS_CACHE", str(REPO_CACHE))

from bhchaos.cache import load_or_compute  # noqa: E402
from bhchaos.hamiltonian import ModelParams  # noqa: E402
from bhchaos.survival import EnergyWindow  # noqa: E402


def _full_scale_spectra(u: float):
    spectra, _ = load_or_compute(ModelParams(L=9, N=9, u=u), threads=2)
    return spectra


@pytest.fixture(scope="session")
def spectra_u05():
    return _full_scale_spectra(0.5)


@pytest.fixture(scope="session")
def spectra_u03():
    return _full_scale_spectra(0.3)


@pytest.fixture(scope="session")
def spectra_u01():
    return _full_scale_spectra(0.1)


@pytest.fixture(scope="session")
def central_window():
    """The full-scale working window: centered on the fitted peak, half-width 2."""
    return EnergyWindow(center=3.60, half_width=2.0)
