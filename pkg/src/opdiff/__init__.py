from opdiff.bounds import theorem_rhs, verify
from opdiff.config import OpdiffConfig
from opdiff.exceptions import (
    ConvergenceError,
    DomainError,
    ExprSyntaxError,
    IncompatibleTheoremError,
    OpdiffError,
    ParameterError,
    UnknownIdentifierError,
)
from opdiff.expr import SmoothFn, evaluate, from_source, parse, unparse
from opdiff.models import (
    BoundReport,
    Family,
    FigureSpec,
    JacobiParams,
    OperatorSpec,
    RhsTerms,
    Theorem,
    Verdict,
)
from opdiff.operators import apply, derivative, difference, lower

__version__ = "0.1.0"

__all__ = [
    "OpdiffConfig",
    "parse",
    "unparse",
    "evaluate",
    "from_source",
    "SmoothFn",
    "apply",
    "derivative",
    "lower",
    "difference",
    "verify",
    "theorem_rhs",
    "Family",
    "Theorem",
    "Verdict",
    "JacobiParams",
    "OperatorSpec",
    "RhsTerms",
    "BoundReport",
    "FigureSpec",
    "OpdiffError",
    "ExprSyntaxError",
    "UnknownIdentifierError",
    "DomainError",
    "ParameterError",
    "IncompatibleTheoremError",
    "ConvergenceError",
]
