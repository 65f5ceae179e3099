"""Exceptions raised by the numerical pipelines."""


class CatBellError(Exception):
    """Base class for all package errors."""


class NonConvergence(CatBellError):
    """Refining the phase quadrature did not stabilise the result."""


class TruncationTooLossy(CatBellError):
    """The Fock cutoff discards more probability than allowed."""


class InconsistentConfigs(CatBellError):
    """Distributions combined into one CHSH value differ in more than angles."""


class DegenerateDeadZone(CatBellError):
    """A zero-width dead zone cannot host a positive photon threshold."""
