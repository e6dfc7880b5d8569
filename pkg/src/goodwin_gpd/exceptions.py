"""Exception hierarchy shared by all modules."""


class GoodwinGpdError(Exception):
    """Base class for errors raised by this package."""


class DomainError(GoodwinGpdError, ValueError):
    """An argument lies outside the domain of a function."""


class ParameterError(GoodwinGpdError, ValueError):
    """Distribution or model parameters violate their invariants."""


class DataError(GoodwinGpdError, ValueError):
    """Input data are malformed, too small, or degenerate."""


class ConvergenceError(GoodwinGpdError, RuntimeError):
    """An iterative fit failed to converge."""

    def __init__(self, message, iterations=None, diagnostics=None):
        super().__init__(message)
        self.iterations = iterations
        self.diagnostics = diagnostics or {}


class CycleError(GoodwinGpdError, ValueError):
    """A u-v series does not exhibit Lotka-Volterra cycle structure."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class IntegrationError(GoodwinGpdError, ArithmeticError):
    """An ODE integration left the admissible state space."""
