"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 2, numerical singularities (vanishing channel probability,
non-invertible map families) with 3, and violated internal invariants
(NaN in output, broken closed-form cross-checks) with 4.
"""


class ErgochanError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(ErgochanError):
    """Invalid or malformed run configuration (exit code 2)."""


class SingularScheduleError(ErgochanError):
    """Channel probability p(t) is at or below the invertibility floor (exit code 3)."""


class NonInvertibleMapError(ErgochanError):
    """Transfer matrix F(t) is numerically singular; no generator exists (exit code 3)."""


class InvariantViolationError(ErgochanError):
    """An internal consistency check failed, e.g. NaN in results (exit code 4)."""
