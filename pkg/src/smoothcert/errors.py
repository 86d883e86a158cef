class SmoothCertError(Exception):
    """Base class for every error raised by smoothcert."""


class DomainError(SmoothCertError, ValueError):
    """An argument lies outside the domain of the operation."""


class BracketError(SmoothCertError, ValueError):
    """A root-finding bracket has no sign change."""


class ConvergenceError(SmoothCertError, RuntimeError):
    """An iterative solver ran out of iterations."""


class SizeError(SmoothCertError, ValueError):
    """The instance is outside the sizes an operation supports."""


class ConfigurationError(SmoothCertError, ValueError):
    """Inconsistent certification configuration (e.g. shape vs norm pairing)."""


class TrainingError(SmoothCertError, RuntimeError):
    """Training diverged."""
