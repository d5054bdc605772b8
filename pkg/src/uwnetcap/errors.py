"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a model is defined."""


class NumericalError(ArithmeticError):
    """A numerical routine failed to converge or produced an inconsistent result."""


class OutOfPlanError(DomainError):
    """A frequency falls outside every band of a band plan."""


class DerivationViolation(AssertionError):
    """A feasible transmission set broke an inequality the bounds rely on."""
