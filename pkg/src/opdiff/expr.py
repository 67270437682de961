"""Expression language for test functions of x: parse, evaluate, differentiate.

Grammar (whitespace insignificant)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' INTEGER)*
    atom   := NUMBER | FUNC '(' expr ')' | 'x' | 'pi' | '(' expr ')'
    FUNC   := sin | cos | exp | ln | sqrt

Exponents are non-negative integer literals, so differentiation is total.
"""

from __future__ import annotations

import functools
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import TypeAlias, overload

import numpy as np
import numpy.typing as npt
import pyparsing as pp

from opdiff.exceptions import (
    DomainError,
    ExprSyntaxError,
    ParameterError,
    UnknownIdentifierError,
)

logger = logging.getLogger(__name__)

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")

FloatArray: TypeAlias = npt.NDArray[np.float64]


# --- AST ---


@dataclass(frozen=True)
class Const:
    value: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.value):
            raise DomainError(f"constant {self.value!r} is not a finite double")


@dataclass(frozen=True)
class Var:
    """The free variable x."""


@dataclass(frozen=True)
class Pi:
    """Named constant, resolved to double precision at evaluation time."""


@dataclass(frozen=True)
class Neg:
    arg: Expr


@dataclass(frozen=True)
class Call:
    func: str
    arg: Expr


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow:
    base: Expr
    exponent: int

    def __post_init__(self) -> None:
        if self.exponent < 0:
            raise ValueError("exponent must be a non-negative integer")


Expr: TypeAlias = Const | Var | Pi | Neg | Call | BinOp | Pow

ZERO = Const(0.0)
ONE = Const(1.0)


# --- Parsing ---


class _UnknownName(pp.ParseSyntaxException):
    """Carries an unknown identifier out of a parse action without backtracking."""


def _make_symbol(s: str, loc: int, toks: pp.ParseResults) -> Expr:
    name = toks[0]
    if name == "x":
        return Var()
    if name == "pi":
        return Pi()
    raise _UnknownName(s, loc, name)


def _make_call(s: str, loc: int, toks: pp.ParseResults) -> Expr:
    name = toks[0]
    if name not in FUNCTIONS:
        raise _UnknownName(s, loc, name)
    return Call(name, toks[1])


def _fold_power(toks: pp.ParseResults) -> Expr:
    items = list(toks)
    result: Expr = items[0]
    for exponent in items[1:]:
        result = Pow(result, exponent)
    return result


def _fold_binary(toks: pp.ParseResults) -> Expr:
    items = list(toks)
    result: Expr = items[0]
    for op, rhs in zip(items[1::2], items[2::2], strict=True):
        result = BinOp(op, result, rhs)
    return result


def _build_grammar() -> pp.ParserElement:
    number = pp.Regex(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?").set_name("number")
    number.set_parse_action(lambda toks: Const(float(toks[0])))
    integer = pp.Regex(r"\d+").set_name("integer exponent")
    integer.set_parse_action(lambda toks: int(toks[0]))
    ident = pp.Regex(r"[A-Za-z_][A-Za-z0-9_]*").set_name("identifier")

    expr = pp.Forward().set_name("expression")
    call = (ident.copy() + pp.Suppress("(") - (expr + pp.Suppress(")"))).set_parse_action(
        _make_call
    )
    symbol = ident.copy().set_parse_action(_make_symbol)
    group = pp.Suppress("(") - (expr + pp.Suppress(")"))
    atom = (number | call | symbol | group).set_name("operand")

    power = (atom + pp.ZeroOrMore(pp.Suppress("^") - integer)).set_parse_action(_fold_power)
    unary = pp.Forward().set_name("operand")
    unary <<= (pp.Suppress("-") + unary).set_parse_action(lambda toks: Neg(toks[0])) | power
    term = (unary + pp.ZeroOrMore(pp.one_of("* /") + unary)).set_parse_action(_fold_binary)
    total = (term + pp.ZeroOrMore(pp.one_of("+ -") + term)).set_parse_action(_fold_binary)
    expr <<= total
    return expr.parse_with_tabs()


_GRAMMAR = _build_grammar()


def _byte_offset(src: str, loc: int) -> int:
    return len(src[:loc].encode("utf-8"))


def _expected(msg: str) -> frozenset[str]:
    text = msg.removeprefix("Expected ").split(", found")[0].strip()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1]
    return frozenset(part.strip() for part in text.split(" | ") if part.strip())


def parse(src: str) -> Expr:
    """Parse ``src`` into an expression tree."""
    if not src.strip():
        raise ExprSyntaxError("empty expression", 0, frozenset({"expression"}))
    try:
        result = _GRAMMAR.parse_string(src, parse_all=True)
    except _UnknownName as e:
        raise UnknownIdentifierError(str(e.msg), _byte_offset(src, e.loc)) from None
    except pp.ParseBaseException as e:
        raise ExprSyntaxError(e.msg, _byte_offset(src, e.loc), _expected(e.msg)) from None
    node: Expr = result[0]
    return node


# --- Unparsing ---

_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2}
_UNARY = 3
_ATOM = 5


def _precedence(e: Expr) -> int:
    match e:
        case BinOp(op, _, _):
            return _PRECEDENCE[op]
        case Neg():
            return _UNARY
        case Const(value) if value < 0 or math.copysign(1.0, value) < 0:
            return _UNARY
        case Pow():
            return 4
        case _:
            return _ATOM


def _wrap(e: Expr, threshold: int) -> str:
    text = unparse(e)
    return f"({text})" if _precedence(e) < threshold else text


def unparse(e: Expr) -> str:
    """Render ``e`` as source text that parses back to the same tree."""
    match e:
        case Const(value):
            return repr(value)
        case Var():
            return "x"
        case Pi():
            return "pi"
        case Neg(arg):
            return "-" + _wrap(arg, _UNARY)
        case Call(func, arg):
            return f"{func}({unparse(arg)})"
        case Pow(base, exponent):
            return f"{_wrap(base, _ATOM)}^{exponent}"
        case BinOp(op, left, right):
            prec = _PRECEDENCE[op]
            sep = f" {op} " if prec == 1 else op
            return _wrap(left, prec) + sep + _wrap(right, prec + 1)
    raise TypeError(f"not an expression node: {e!r}")


# --- Simplifying constructors ---


def _is(e: Expr, value: float) -> bool:
    return isinstance(e, Const) and e.value == value


def neg(a: Expr) -> Expr:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0):
        return b
    if _is(b, 0.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return BinOp("+", a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is(b, 0.0):
        return a
    if _is(a, 0.0):
        return neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    return BinOp("-", a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is(a, 0.0) or _is(b, 0.0):
        return ZERO
    if _is(a, 1.0):
        return b
    if _is(b, 1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return BinOp("*", a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is(b, 1.0):
        return a
    if _is(a, 0.0) and not _is(b, 0.0):
        return ZERO
    if isinstance(a, Const) and isinstance(b, Const) and b.value != 0.0:
        return Const(a.value / b.value)
    return BinOp("/", a, b)


def _float_power(value: float, k: int) -> float:
    try:
        return value**k
    except OverflowError:
        raise DomainError(f"{value!r}^{k} overflows a double") from None


def power(a: Expr, k: int) -> Expr:
    if k == 0:
        return ONE
    if k == 1:
        return a
    if isinstance(a, Const):
        return Const(_float_power(a.value, k))
    return Pow(a, k)


def simplify(e: Expr) -> Expr:
    """Constant folding and 0/1 identities, bottom-up. No canonicalization."""
    match e:
        case Neg(arg):
            return neg(simplify(arg))
        case Call(func, arg):
            return Call(func, simplify(arg))
        case Pow(base, exponent):
            return power(simplify(base), exponent)
        case BinOp(op, left, right):
            return _BINARY[op](simplify(left), simplify(right))
        case _:
            return e


_BINARY: dict[str, Callable[[Expr, Expr], Expr]] = {"+": add, "-": sub, "*": mul, "/": div}


# --- Differentiation ---


def depends_on_x(e: Expr) -> bool:
    match e:
        case Var():
            return True
        case Neg(arg) | Call(_, arg) | Pow(arg, _):
            return depends_on_x(arg)
        case BinOp(_, left, right):
            return depends_on_x(left) or depends_on_x(right)
        case _:
            return False


def _outer_derivative(func: str, arg: Expr) -> Expr:
    match func:
        case "sin":
            return Call("cos", arg)
        case "cos":
            return neg(Call("sin", arg))
        case "exp":
            return Call("exp", arg)
        case "ln":
            return div(ONE, arg)
        case "sqrt":
            return div(ONE, mul(Const(2.0), Call("sqrt", arg)))
    raise ValueError(f"unknown function {func!r}")


def differentiate(e: Expr) -> Expr:
    """Exact symbolic derivative with respect to x, simplified."""
    if not depends_on_x(e):
        return ZERO
    match e:
        case Var():
            return ONE
        case Neg(arg):
            return neg(differentiate(arg))
        case BinOp("+", left, right):
            return add(differentiate(left), differentiate(right))
        case BinOp("-", left, right):
            return sub(differentiate(left), differentiate(right))
        case BinOp("*", left, right):
            return add(mul(differentiate(left), right), mul(left, differentiate(right)))
        case BinOp("/", left, right):
            if not depends_on_x(right):
                return div(differentiate(left), right)
            numerator = sub(mul(differentiate(left), right), mul(left, differentiate(right)))
            return div(numerator, power(right, 2))
        case Pow(_, 0):
            return ZERO
        case Pow(base, exponent):
            return mul(mul(Const(float(exponent)), power(base, exponent - 1)), differentiate(base))
        case Call(func, arg):
            return mul(differentiate(arg), _outer_derivative(func, arg))
    raise TypeError(f"not an expression node: {e!r}")


# --- Evaluation ---

_UFUNCS: dict[str, Callable[[FloatArray], FloatArray]] = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "ln": np.log,
    "sqrt": np.sqrt,
}


def _eval(e: Expr, x: FloatArray) -> FloatArray | float:
    match e:
        case Const(value):
            return value
        case Var():
            return x
        case Pi():
            return math.pi
        case Neg(arg):
            return -_eval(arg, x)
        case Pow(base, exponent):
            v = _eval(base, x)
            if isinstance(v, float):
                return _float_power(v, exponent)
            return v**exponent
        case Call(func, arg):
            v = _eval(arg, x)
            if func == "ln" and np.any(np.asarray(v) <= 0.0):
                raise DomainError(f"ln of a non-positive value in {unparse(e)}")
            if func == "sqrt" and np.any(np.asarray(v) < 0.0):
                raise DomainError(f"sqrt of a negative value in {unparse(e)}")
            return _UFUNCS[func](np.asarray(v, dtype=np.float64))
        case BinOp(op, left, right):
            lv = _eval(left, x)
            rv = _eval(right, x)
            if op == "+":
                return lv + rv
            if op == "-":
                return lv - rv
            if op == "*":
                return lv * rv
            if np.any(np.asarray(rv) == 0.0):
                raise DomainError(f"division by zero in {unparse(e)}")
            return lv / rv
    raise TypeError(f"not an expression node: {e!r}")


@overload
def evaluate(e: Expr, x: float) -> float: ...


@overload
def evaluate(e: Expr, x: FloatArray) -> FloatArray: ...


def evaluate(e: Expr, x: float | FloatArray) -> float | FloatArray:
    """IEEE double value of ``e`` at ``x`` (scalar or array, elementwise)."""
    arr = np.asarray(x, dtype=np.float64)
    with np.errstate(over="ignore"):
        out = np.broadcast_to(np.asarray(_eval(e, arr), dtype=np.float64), arr.shape)
    if arr.ndim == 0:
        return float(out)
    return np.array(out, dtype=np.float64)


# --- Smooth function handles ---


@dataclass(frozen=True)
class SmoothFn:
    """A function of x bundled with its symbolic derivatives ``derivs[0..max_order]``."""

    base: Expr
    derivs: tuple[Expr, ...]

    @property
    def max_order(self) -> int:
        return len(self.derivs) - 1

    @property
    def source(self) -> str:
        return unparse(self.base)

    def __call__(self, x: FloatArray) -> FloatArray:
        return evaluate(self.derivs[0], np.asarray(x, dtype=np.float64))

    def derivative(self, order: int) -> Callable[[FloatArray], FloatArray]:
        """Vectorized evaluator of the ``order``-th derivative."""
        if not 0 <= order <= self.max_order:
            raise ParameterError(
                f"derivative of order {order} requested, only {self.max_order} available"
            )
        return functools.partial(_evaluate_array, self.derivs[order])


def _evaluate_array(e: Expr, x: FloatArray) -> FloatArray:
    return evaluate(e, np.asarray(x, dtype=np.float64))


def smooth_fn(e: Expr, max_order: int) -> SmoothFn:
    if max_order < 0:
        raise ParameterError("max_order must be >= 0")
    derivs = [simplify(e)]
    for _ in range(max_order):
        derivs.append(differentiate(derivs[-1]))
    logger.debug("built %d derivatives of %s", max_order, unparse(e))
    return SmoothFn(base=e, derivs=tuple(derivs))


def from_source(src: str, max_order: int) -> SmoothFn:
    """Parse ``src`` and differentiate it ``max_order`` times."""
    return smooth_fn(parse(src), max_order)
