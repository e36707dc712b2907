"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: ``InputError`` -> 1 (bad user input),
``NumericFault`` -> 2 (a computation that should have converged did not).
"""


class EvidregError(Exception):
    """Base class for all errors raised by this package."""


class InputError(EvidregError):
    """Malformed user input: files, columns, dimensions, flag values."""


class NumericFault(EvidregError):
    """Numeric breakdown: non-finite gradients, failed bracketing/bisection."""


class UnboundedQuantile(EvidregError):
    """The requested CDF level is never reached (vacuous number, h = 0)."""
