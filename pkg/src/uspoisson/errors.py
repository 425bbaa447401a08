"""Exception hierarchy for uspoisson.

Library code raises these; only the CLI turns them into exit codes.
"""
# Created: 2026-10-18

from typing import Any, Optional


class USPoissonError(Exception):
    """Base error for everything the solver surfaces to the user."""


class DimensionError(USPoissonError):
    """Raised when operand shapes do not agree."""


class SingularMatrixError(USPoissonError):
    """Raised when LU factorization meets an exact zero pivot."""

    def __init__(self, column: int, message: Optional[str] = None) -> None:
        self.column = column
        super().__init__(message or f"Matrix is singular: zero pivot in column {column}")


class DegenerateConstraintsError(USPoissonError):
    """Raised when boundary functionals lose rank on a recombination column."""

    def __init__(self, column: int, message: Optional[str] = None) -> None:
        self.column = column
        super().__init__(
            message or f"Boundary constraints are degenerate at column {column}"
        )


class SpectrumError(USPoissonError):
    """Raised when a spectral interval is unusable (complex, indefinite, contains 0)."""


class ShiftCollisionError(USPoissonError):
    """Raised when an ADI shift hits an eigenvalue or a sample point."""

    def __init__(self, index: int, message: Optional[str] = None) -> None:
        self.index = index
        super().__init__(message or f"Shift {index} collides with the spectrum")


class DivergenceError(USPoissonError):
    """Raised when an iterate stops being finite."""


class ConvergenceError(USPoissonError):
    """Raised when an eigenvalue iteration does not settle."""


class OracleSizeError(USPoissonError):
    """Raised when a dense reference computation is asked for too large a size."""


class CornerCompatibilityError(USPoissonError):
    """Raised when boundary data disagree at a corner."""


class UnresolvedError(USPoissonError):
    """Raised when the doubling driver hits max_n before resolving.

    Carries the best iterate (``best``) and the accumulated report so callers
    can still inspect or write out what was computed.
    """

    def __init__(self, message: str, best: Any = None, report: Any = None) -> None:
        self.best = best
        self.report = report
        super().__init__(message)


class ExpressionError(USPoissonError):
    """Base error for problems in user-supplied expressions."""


class DomainError(ExpressionError):
    """Raised when an expression or sample leaves its domain."""


class ExpressionSyntaxError(ExpressionError):
    """Raised on malformed expression text; ``offset`` is the byte position."""

    def __init__(self, message: str, offset: int) -> None:
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifierError(ExpressionError):
    """Raised when an expression names a variable or function we do not know."""

    def __init__(self, name: str, offset: int) -> None:
        self.name = name
        self.offset = offset
        super().__init__(f"Unknown identifier '{name}' at offset {offset}")


class ConfigError(USPoissonError):
    """Raised when a problem or settings file is invalid.

    ``key`` is the dotted path (e.g. ``bc.top.theta``), ``line`` is 1-based
    when known.
    """

    def __init__(self, message: str, key: Optional[str] = None, line: Optional[int] = None) -> None:
        self.message = message
        self.key = key
        self.line = line
        where = ""
        if key:
            where += f" [{key}]"
        if line:
            where += f" (line {line})"
        super().__init__(f"{message}{where}")
