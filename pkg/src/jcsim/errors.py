"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """Caller passed an argument that violates an operation's contract."""


class DegenerateFormulaError(ArithmeticError):
    """A closed-form expression is singular at the requested parameters."""


class DegenerateTransitionError(ArithmeticError):
    """Counter-diabatic formula hit a degenerate pair with a nonzero numerator."""


class StructureError(RuntimeError):
    """An operator did not fit the expected structural ansatz."""


class AccuracyError(RuntimeError):
    """A numerical-accuracy invariant (norm, trace, convergence) was violated."""
