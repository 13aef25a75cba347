"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UsageError(RuntimeError):
    """An operation was invoked in a state that violates its contract."""


class ConfigurationError(ValueError):
    """A design or run configuration is unusable (e.g. unreachable region)."""


class NumericError(ArithmeticError):
    """A numerical routine failed to reach its target accuracy."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConvergenceError(NumericError):
    """A series did not converge within its term budget.

    Carries the partial sum and the number of terms consumed so callers
    can decide whether to fall back to quadrature.
    """

    def __init__(self, message, partial_sum, terms):
        super().__init__(message, {"partial_sum": partial_sum, "terms": terms})
        self.partial_sum = partial_sum
        self.terms = terms
