"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid input: bad law, infeasible constraint, malformed config."""


class SizeBudgetError(RuntimeError):
    """A computation would exceed its declared state-space budget."""


class InfeasibleError(InputError):
    """Constraint set admits no probability distribution."""
