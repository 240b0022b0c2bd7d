"""Exception types shared across the package."""


class TaylorLabError(Exception):
    pass


class ParseError(TaylorLabError):
    """Malformed s-expression or JSON input. ``position`` is a character offset when known."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)
        self.position = position


class ArityError(TaylorLabError):
    pass


class ShapeError(TaylorLabError):
    """An equation system does not have the shape an operation requires."""


class PreconditionError(TaylorLabError):
    """A documented precondition failed; ``counterexample`` names the offending data."""

    def __init__(self, message, counterexample=None):
        super().__init__(message)
        self.counterexample = counterexample


class BudgetExceeded(TaylorLabError):
    pass
