"""Exception types shared across the package."""


class GeometryError(ValueError):
    """A geometric precondition was violated (wrong point class, degenerate input)."""


class InvalidSymbolError(ValueError):
    """The Schlafli symbol is malformed or outside the supported family."""


class NumericalError(RuntimeError):
    """A numerical routine failed to reach its tolerance or an invariant broke."""


class BudgetExceededError(RuntimeError):
    """An enumeration grew past its configured instance cap."""
