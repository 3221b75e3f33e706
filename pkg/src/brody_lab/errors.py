"""Exception types shared across the package.

The CLI maps these onto exit codes: ``InputError`` -> 2, ``NumericalFailure`` and ``ReportIOError`` -> 3.
"""


class BrodyLabError(Exception):
    """Base class for all package errors."""


class InputError(BrodyLabError, ValueError):
    """Invalid arguments or a violated precondition."""


class NumericalFailure(BrodyLabError, ArithmeticError):
    """A requested tolerance could not be reached or a self-check failed."""


class ReportIOError(BrodyLabError, OSError):
    """A report could not be read or written."""
