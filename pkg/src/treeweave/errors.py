"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates an operation's precondition."""


class CapacityError(DomainError):
    """Input is too large for an exact (exponential or dense) routine."""


class SolverError(RuntimeError):
    """The iterative eigensolver did not reach the requested tolerance."""

    def __init__(self, message, best_residual):
        super().__init__(message)
        self.best_residual = best_residual


class ScenarioError(RuntimeError):
    """A churn scenario cannot continue (e.g. the population would vanish)."""
