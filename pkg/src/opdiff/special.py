"""Log-gamma, beta, generalized binomial coefficients, rising and falling factorials.

Every Gamma quotient in the operator prefactors goes through log space; factorial
quotients overflow long before n = 150 with r = 5.
"""

from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt
from scipy import special as sc

from opdiff.exceptions import DomainError
from opdiff.models import FactorialKind

EXACT_BINOMIAL_LIMIT = 30


def log_gamma(x: float) -> float:
    if not x > 0.0:
        raise DomainError(f"log_gamma needs x > 0, got {x}")
    return float(sc.gammaln(x))


def log_beta(a: float, b: float) -> float:
    if not (a > 0.0 and b > 0.0):
        raise DomainError(f"beta needs positive arguments, got ({a}, {b})")
    return float(sc.betaln(a, b))


def beta(a: float, b: float) -> float:
    return math.exp(log_beta(a, b))


def _is_integer(v: float) -> bool:
    return float(v).is_integer()


def log_gen_binom(
    a: float | npt.ArrayLike, b: float | npt.ArrayLike
) -> npt.NDArray[np.float64]:
    """ln Gamma(a+1) - ln Gamma(b+1) - ln Gamma(a-b+1), elementwise."""
    aa = np.asarray(a, dtype=np.float64)
    bb = np.asarray(b, dtype=np.float64)
    if np.any(bb + 1.0 <= 0.0) or np.any(aa - bb + 1.0 <= 0.0) or np.any(aa + 1.0 <= 0.0):
        raise DomainError(f"generalized binomial outside its domain: a={a}, b={b}")
    out: npt.NDArray[np.float64] = sc.gammaln(aa + 1.0) - sc.gammaln(bb + 1.0) - sc.gammaln(
        aa - bb + 1.0
    )
    return out


def gen_binom(a: float, b: float) -> float:
    """Gamma(a+1) / (Gamma(b+1) Gamma(a-b+1)); exact for integer a <= 30."""
    if a + 1.0 <= 0.0 or b + 1.0 <= 0.0 or a - b + 1.0 <= 0.0:
        raise DomainError(f"generalized binomial outside its domain: a={a}, b={b}")
    if _is_integer(a) and _is_integer(b) and a <= EXACT_BINOMIAL_LIMIT:
        return float(math.comb(int(a), int(b)))
    return math.exp(float(log_gen_binom(a, b)))


def factorial_product(kind: FactorialKind) -> float:
    sign = 1.0 if kind.tag == "rising" else -1.0
    return math.prod((kind.base + sign * nu for nu in range(kind.length)), start=1.0)


def rising(x: float, length: int) -> float:
    return factorial_product(FactorialKind(tag="rising", base=x, length=length))


def falling(x: float, length: int) -> float:
    return factorial_product(FactorialKind(tag="falling", base=x, length=length))


def log_rising(x: float, length: int) -> float:
    if not x > 0.0:
        raise DomainError(f"log_rising needs a positive base, got {x}")
    return float(sc.gammaln(x + length) - sc.gammaln(x))


def log_falling(x: float, length: int) -> float:
    if not x - length + 1.0 > 0.0:
        raise DomainError(f"log_falling needs x - length + 1 > 0, got x={x}, length={length}")
    return float(sc.gammaln(x + 1.0) - sc.gammaln(x - length + 1.0))
