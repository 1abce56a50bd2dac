"""Exception types shared across the package."""


class FatpointsError(Exception):
    """Base class for all package errors."""


class ConfigurationError(FatpointsError):
    """Invalid run configuration (non-prime modulus, modulus too small, ...)."""


class TrialDisagreement(FatpointsError):
    """Independent randomized trials returned different values.

    Indicates an unlucky prime/seed combination; re-run with fresh seeds
    or a different prime.
    """


class DegreeCapExceeded(FatpointsError):
    """Polynomial elimination overflowed the configured t-degree cap.

    Raise the t-degree cap, or use the series engine instead.
    """


class PrecisionExhausted(FatpointsError):
    """Internal: the truncated-series engine ran out of t-adic precision."""


class NotStabilized(FatpointsError):
    """A Hilbert function did not stabilize by the requested degree; raise D."""


class InvalidFamily(FatpointsError):
    """A collision family violates its constructor contract."""


class NotGeneral(FatpointsError):
    """A sampled configuration failed a generality check after bounded retries."""


class SpecParseError(FatpointsError):
    """A linear-system spec string failed to parse."""

    def __init__(self, message, pos=None):
        super().__init__(message if pos is None else f"{message} (at position {pos})")
        self.pos = pos
