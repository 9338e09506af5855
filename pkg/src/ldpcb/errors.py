"""Exception hierarchy.

The CLI maps these onto exit statuses: validation problems exit with 1,
numeric and degenerate-bound problems with 2.
"""


class LdpcbError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(LdpcbError, ValueError):
    """Input that violates a documented precondition."""


class InconsistentAssignmentError(ValidationError):
    """Bit and edge fractions that do not describe one graph."""


class InstanceTooLargeError(ValidationError):
    """An exhaustive computation was requested on an instance that is too big."""


class NumericError(LdpcbError, ArithmeticError):
    """A numerical procedure did not meet its tolerance.

    ``achieved`` carries the error estimate that was actually reached, when
    one is known.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class DegenerateBoundError(NumericError):
    """The bound is meaningless for these inputs (for example a noiseless
    bracket or zero average capacity)."""


class MonotonicityError(NumericError):
    """Sampled values along a bisection bracket are not monotone."""


class BracketError(NumericError):
    """No sign change could be found for a threshold search."""
