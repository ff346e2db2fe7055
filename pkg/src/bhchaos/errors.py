"""Exception taxonomy shared across the package.

The CLI maps these onto process exit codes: ConfigError -> 2,
NumericalError -> 3, CacheError -> 4.
"""


class BhchaosError(Exception):
    """Base class for package errors."""


class ConfigError(BhchaosError):
    """Invalid parameters, selections, or run configuration."""


class NumericalError(BhchaosError):
    """A numerical procedure failed or produced an unusable result."""


class UnfoldingError(NumericalError):
    """Staircase fit for spectral unfolding is unusable."""

    def __init__(self, message: str, condition: float | None = None):
        super().__init__(message)
        self.condition = condition


class CacheError(BhchaosError):
    """Spectrum cache on disk cannot be used."""


class CacheVersionError(CacheError):
    """Cache manifest was written by an incompatible format version."""


class CacheChecksumError(CacheError):
    """Stored eigenvalues do not match their recorded checksum."""
