"""Exception hierarchy shared by every kptau module."""


class KPTauError(Exception):
    """Base class for all library errors."""


class ShapeError(KPTauError, ValueError):
    pass


class RankError(KPTauError, ValueError):
    pass


class BackendUnsupported(KPTauError):
    """Raised when the exact backend would need a transcendental value."""


class EigenvalueCollision(KPTauError, ValueError):
    """Two Jordan blocks share an eigenvalue where distinct spectra are required."""


class DegenerateK(KPTauError):
    pass


class SingularAtOrigin(KPTauError):
    """det(F A C^T) vanishes, so the model is outside the big cell."""


class ZeroTau(KPTauError):
    pass


class ShiftDomainError(KPTauError, ValueError):
    pass


class BoxError(KPTauError, ValueError):
    pass


class DegenerateVandermonde(KPTauError):
    pass


class ConfigError(KPTauError, ValueError):
    """Invalid configuration document; the message carries the field path."""
