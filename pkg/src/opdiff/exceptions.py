class OpdiffError(Exception):
    """Base exception for all opdiff errors."""


class ExprSyntaxError(OpdiffError):
    """Raised when an expression source does not match the grammar."""

    def __init__(self, message: str, offset: int, expected: frozenset[str] = frozenset()):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset
        self.expected = expected


class UnknownIdentifierError(OpdiffError):
    """Raised for identifiers other than x, pi and the accepted function names."""

    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier {name!r} (at byte {offset})")
        self.name = name
        self.offset = offset


class DomainError(OpdiffError):
    """Raised when a numeric evaluation leaves the real domain of its arguments."""


class ParameterError(OpdiffError):
    """Raised on operator parameters outside their valid range."""


class IncompatibleTheoremError(ParameterError):
    """Raised when a theorem is paired with an operator family it does not cover."""


class ConvergenceError(OpdiffError):
    """Raised when the tridiagonal eigen-solve fails. Signals a bug, not bad input."""
