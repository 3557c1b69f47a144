"""Exception types shared across the package."""


class GraphParseError(ValueError):
    """Malformed graph input (edge list or graph6 record)."""


class BudgetError(RuntimeError):
    """A request exceeds a hard size/enumeration budget and is refused."""


class ConvergenceError(RuntimeError):
    """An iterative solver failed to converge within its iteration cap."""
