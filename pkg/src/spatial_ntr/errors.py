"""Exception types shared across the package."""


class NTRError(Exception):
    """Base class for errors raised by :mod:`spatial_ntr`."""


class DomainError(NTRError, ValueError):
    """An argument lies outside the domain of the requested function."""


class ConfigurationError(NTRError, ValueError):
    """A family, baseline or run configuration is unusable."""


class UnsupportedFamilyError(NTRError, TypeError):
    """The operation is only defined for a different kind of jump law."""


class ConvergenceError(NTRError, ArithmeticError):
    """A numerical routine did not reach its tolerance.

    The best estimate obtained is kept on ``estimate`` and the reported
    error bound on ``error``.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
