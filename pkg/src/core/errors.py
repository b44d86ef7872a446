"""
Exception hierarchy for the ARW lab.

Precondition and validation failures subclass ``ValueError`` so callers (and
the CLI) can treat them as bad input. Failures that only show up while a
computation runs subclass ``RuntimeError``.
"""


class ArwError(Exception):
    """Base class for every error raised by the lab."""


# ──────────────────────────────────────────────────────────────────────────────
# Validation errors (bad input, exit code 1 at the CLI)
# ──────────────────────────────────────────────────────────────────────────────

class InvalidSizeError(ArwError, ValueError):
    """Topology size out of range (e.g. an interval with n = 0)."""


class KernelError(ArwError, ValueError):
    """Transition kernel row is negative or does not sum to 1."""


class AccessibilityError(ArwError, ValueError):
    """Vertices not mutually accessible, or the sink unreachable."""


class UnsupportedIndexError(ArwError, ValueError):
    """Instruction index j <= 0 (extended odometers are not emulated)."""


class IllegalToppleError(ArwError, ValueError):
    """Toppling a site that holds no particle."""


class SinkToppleError(ArwError, ValueError):
    """Toppling the sink."""


class IllegalJumpError(ArwError, ValueError):
    """Jumping a particle from an empty site."""


class InvalidDrivingError(ArwError, ValueError):
    """Driving a particle into the sink, or an exhausted explicit sequence."""


class DomainError(ArwError, ValueError):
    """Configuration outside the domain of an operation (e.g. sleeping sites)."""


class StateSpaceTooLargeError(ArwError, ValueError):
    """Plug-in estimator requested on too many sites."""


class ConfigurationFormatError(ArwError, ValueError):
    """Malformed serialized configuration or odometer."""


# ──────────────────────────────────────────────────────────────────────────────
# Runtime errors (exit code 2 at the CLI)
# ──────────────────────────────────────────────────────────────────────────────

class NonTerminationError(ArwError, RuntimeError):
    """Toppling cap exceeded during stabilization or jump rounds."""


class BudgetExceededError(ArwError, RuntimeError):
    """Oracle enumeration visited more nodes than its budget allows."""


class GridTooCoarseError(ArwError, RuntimeError):
    """A bound crossing is not bracketed by the requested t-grid."""
