# Exception hierarchy shared across the package.
#
# CLI exit codes are keyed off these: ValidationError -> 2,
# ConvergenceError -> 3, SizeCapError -> 4.


class ValidationError(ValueError):
    """Input data violates a structural invariant (bad matrix, bad distribution...)."""


class ConvergenceError(RuntimeError):
    """A solver failed to certify its tolerance; carries the best iterate found."""

    def __init__(self, message, best=None, report=None):
        super().__init__(message)
        self.best = best
        self.report = report


class SizeCapError(ValueError):
    """A requested computation exceeds the hard desk-scale size caps."""


class InvariantViolationError(RuntimeError):
    """A cross-checked mathematical ordering failed beyond tolerance.

    Raised when independently computed quantities disagree in a way that
    signals a solver or input bug rather than normal numerical noise.
    """
