"""Exception hierarchy shared by all modules."""


class StarExpError(Exception):
    """Base class for every error raised by this package."""


class DomainError(StarExpError, ValueError):
    """An argument lies outside the domain of an operation."""


class SingularityError(StarExpError, ArithmeticError):
    """A pivot of a triangular-structured solve vanished."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ConvergenceError(StarExpError, ArithmeticError):
    """An iterative factorization failed to converge."""


class ConstructionError(StarExpError):
    """Two independent constructions of the same object disagree."""


class BudgetError(StarExpError, ValueError):
    """A dense computation would exceed its size budget."""


class InadmissibleParameters(StarExpError, ValueError):
    """Hypotheses of an a-priori bound are not met.

    ``violations`` lists the failed inequalities in human-readable form.
    """

    def __init__(self, violations):
        self.violations = tuple(violations)
        super().__init__("inadmissible parameters: " + "; ".join(self.violations))


class MatrixMarketError(StarExpError, ValueError):
    """Malformed Matrix Market input."""

    def __init__(self, message, lineno=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)
        self.lineno = lineno
        self.path = path


class NumericalOverflowError(StarExpError, ArithmeticError):
    """A result contains non-finite entries."""
