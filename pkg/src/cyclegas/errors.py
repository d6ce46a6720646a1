"""Exception types shared across the package.

The CLI maps these onto exit codes: validation problems exit 2,
cap/precision problems exit 3.
"""


class CycleGasError(Exception):
    """Base class for all library errors."""


class ValidationError(CycleGasError, ValueError):
    """Invalid input: a precondition or structural invariant is violated."""


class DivergenceError(ValidationError):
    """A series diverges at the requested arguments (e.g. g_s(0) for s <= 1)."""


class CapError(CycleGasError, ValueError):
    """A hard resource cap (enumeration size, permutation count) was exceeded."""


class PrecisionError(CycleGasError, RuntimeError):
    """The requested tolerance cannot be certified within the term cap."""
