"""Exception types shared across the package."""


class GaussMatchError(Exception):
    """Base class for every error this package raises deliberately."""


class InvalidInputError(GaussMatchError, ValueError):
    """An argument violates an operation's contract (shape, finiteness, range)."""


class SingularMatrixError(GaussMatchError):
    """A matrix that must be positive definite is singular at working precision.

    Carries the offending smallest eigenvalue when it is known.
    """

    def __init__(self, message, smallest_eigenvalue=None):
        super().__init__(message)
        self.smallest_eigenvalue = smallest_eigenvalue


class InsufficientDataError(GaussMatchError, ValueError):
    """A dataset has too few points for the requested statistic."""


class ParseError(GaussMatchError, ValueError):
    """Malformed text or image input; ``line`` is 1-based when applicable."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class OracleConvergenceError(GaussMatchError, RuntimeError):
    """The numerical minimizer did not converge; carries the best value seen."""

    def __init__(self, message, best_value=None):
        super().__init__(message)
        self.best_value = best_value
