"""Bernstein basis, forward and divided differences, B_n and the operator Q_n^k."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import overload

import numpy as np
import numpy.typing as npt
from scipy import special as sc

from opdiff.exceptions import DomainError, ParameterError
from opdiff.models import BasisIndex
from opdiff.quadrature import Antiderivative, Evaluable, FloatArray, antiderivative
from opdiff.special import EXACT_BINOMIAL_LIMIT, log_falling, log_gen_binom

_SAMPLE_SLACK = 1e-12


def _grid(x: float | npt.ArrayLike) -> FloatArray:
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(xs < 0.0) or np.any(xs > 1.0):
        raise DomainError("evaluation point outside [0, 1]")
    return xs


@overload
def _shaped(values: FloatArray, x: float) -> float: ...


@overload
def _shaped(values: FloatArray, x: FloatArray) -> FloatArray: ...


def _shaped(values: FloatArray, x: float | FloatArray) -> float | FloatArray:
    if np.ndim(x) == 0:
        return float(values[0])
    return values.reshape(np.shape(x))


def basis_values(a: float, b: npt.ArrayLike, x: npt.ArrayLike) -> FloatArray:
    """p_{a,b}(x) for every (x, b) pair, shape (len(x), len(b)).

    Integer degree a <= 30 takes the exact binomial path; otherwise log space, with
    endpoints resolved by xlogy (0 * log 0 = 0).
    """
    xs = _grid(x)
    bs = np.atleast_1d(np.asarray(b, dtype=np.float64))
    rest = a - bs
    at_zero = xs == 0.0
    at_one = xs == 1.0
    if (np.any(at_zero) and np.any(bs < 0.0)) or (np.any(at_one) and np.any(rest < 0.0)):
        raise DomainError("basis evaluated at an endpoint with a negative exponent")
    if float(a).is_integer() and a <= EXACT_BINOMIAL_LIMIT and np.all(np.mod(bs, 1.0) == 0.0):
        coef = np.array([math.comb(int(a), int(k)) for k in bs], dtype=np.float64)
        out: FloatArray = coef * xs[:, None] ** bs * (1.0 - xs)[:, None] ** rest
        return out
    logs = (
        log_gen_binom(a, bs)[None, :]
        + sc.xlogy(bs[None, :], xs[:, None])
        + sc.xlog1py(rest[None, :], -xs[:, None])
    )
    out = np.exp(logs)
    return out


def basis(idx: BasisIndex, x: float) -> float:
    """gen_binom(a, b) x^b (1-x)^(a-b)."""
    return float(basis_values(idx.degree, idx.index, x)[0, 0])


def basis_matrix(n: int, x: float | npt.ArrayLike) -> FloatArray:
    """Rows p_{n,0..n}(x_i) for an integer degree n."""
    return basis_values(float(n), np.arange(n + 1, dtype=np.float64), x)


def _samples(f: Evaluable, x0: float, h: float, r: int) -> FloatArray:
    if h <= 0.0 or r < 0:
        raise ParameterError(f"forward differences need h > 0 and r >= 0, got h={h}, r={r}")
    if x0 < -_SAMPLE_SLACK or x0 + r * h > 1.0 + _SAMPLE_SLACK:
        raise DomainError(f"difference stencil [{x0}, {x0 + r * h}] leaves [0, 1]")
    points = np.clip(x0 + h * np.arange(r + 1), 0.0, 1.0)
    return np.asarray(f(points), dtype=np.float64)


def forward_diff(f: Evaluable, x0: float, h: float, r: int) -> float:
    """Alternating binomial sum for Delta_h^r f(x0)."""
    values = _samples(f, x0, h, r)
    signs = [(-1) ** (r - j) * math.comb(r, j) for j in range(r + 1)]
    return float(np.dot(signs, values))


def divided_diff(f: Evaluable, x0: float, h: float, r: int) -> float:
    return forward_diff(f, x0, h, r) / (math.factorial(r) * h**r)


@dataclass(frozen=True, eq=False)
class DiffTable:
    """Forward differences of order r at every base point of a uniform grid."""

    step: float
    order: int
    points: FloatArray
    values: FloatArray

    @classmethod
    def from_samples(
        cls, samples: npt.ArrayLike, step: float, order: int, start: float = 0.0
    ) -> DiffTable:
        ys = np.asarray(samples, dtype=np.float64)
        if order >= ys.size:
            raise ParameterError(f"cannot take order-{order} differences of {ys.size} samples")
        values = np.diff(ys, order)
        points = start + step * np.arange(values.size)
        return cls(step=step, order=order, points=points, values=values)

    @classmethod
    def from_function(cls, f: Evaluable, n: int, order: int) -> DiffTable:
        """Differences of f sampled at i/n, i = 0..n."""
        return cls.from_samples(f(np.linspace(0.0, 1.0, n + 1)), 1.0 / n, order)


def deriv_from_samples(samples: FloatArray, n: int, r: int, x: FloatArray) -> FloatArray:
    # (B_n f)^(r) = n^(falling r) sum_i p_{n-r,i}(x) Delta^r f(i/n)
    if r < 0:
        raise ParameterError(f"derivative order must be >= 0, got r={r}")
    if r > n:
        raise ParameterError(f"derivative order r={r} exceeds n={n}")
    table = DiffTable.from_samples(samples, 1.0 / n, r)
    scale = math.exp(log_falling(float(n), r))
    out: FloatArray = scale * (basis_matrix(n - r, x) @ table.values)
    return out


@overload
def bernstein_eval(f: Evaluable, n: int, x: float) -> float: ...


@overload
def bernstein_eval(f: Evaluable, n: int, x: FloatArray) -> FloatArray: ...


def bernstein_eval(f: Evaluable, n: int, x: float | FloatArray) -> float | FloatArray:
    if n < 1:
        raise ParameterError(f"B_n needs n >= 1, got {n}")
    xs = _grid(x)
    values = basis_matrix(n, xs) @ np.asarray(f(np.arange(n + 1) / n), dtype=np.float64)
    return _shaped(values, x)


@overload
def bernstein_deriv(f: Evaluable, n: int, r: int, x: float) -> float: ...


@overload
def bernstein_deriv(f: Evaluable, n: int, r: int, x: FloatArray) -> FloatArray: ...


def bernstein_deriv(f: Evaluable, n: int, r: int, x: float | FloatArray) -> float | FloatArray:
    if r == 0:
        return bernstein_eval(f, n, x)
    if n < 1:
        raise ParameterError(f"B_n needs n >= 1, got {n}")
    xs = _grid(x)
    samples = np.asarray(f(np.arange(n + 1) / n), dtype=np.float64)
    return _shaped(deriv_from_samples(samples, n, r, xs), x)


def q_op_prefactor(n: int, k: int) -> float:
    """n^k (n-k)! / n!, via log-gamma."""
    if not 1 <= k <= n:
        raise ParameterError(f"Q_n^k needs 1 <= k <= n, got n={n}, k={k}")
    return math.exp(k * math.log(n) + sc.gammaln(n - k + 1) - sc.gammaln(n + 1))


def _resolve_antiderivative(
    f: Evaluable, k: int, antideriv: Evaluable | None, panels: int
) -> Evaluable:
    if antideriv is None:
        return antiderivative(f, k, panels)
    if isinstance(antideriv, Antiderivative) and antideriv.order != k:
        raise ParameterError(f"antiderivative has order {antideriv.order}, expected {k}")
    return antideriv


def q_op_eval(
    f: Evaluable,
    n: int,
    k: int,
    x: float | FloatArray,
    antideriv: Evaluable | None = None,
    panels: int = 128,
) -> float | FloatArray:
    """Q_n^k f = (n^k (n-k)!/n!) (B_n F)^(k) with F any order-k antiderivative of f."""
    pref = q_op_prefactor(n, k)
    big_f = _resolve_antiderivative(f, k, antideriv, panels)
    xs = _grid(x)
    samples = np.asarray(big_f(np.arange(n + 1) / n), dtype=np.float64)
    return _shaped(pref * deriv_from_samples(samples, n, k, xs), x)


def q_op_deriv(
    f: Evaluable,
    n: int,
    k: int,
    r: int,
    x: float | FloatArray,
    antideriv: Evaluable | None = None,
    panels: int = 128,
) -> float | FloatArray:
    """(Q_n^k f)^(r) = (n^k (n-k)!/n!) (B_n F)^(k+r)."""
    if k + r > n:
        raise ParameterError(f"(Q_n^k f)^(r) needs k + r <= n, got k={k}, r={r}, n={n}")
    pref = q_op_prefactor(n, k)
    big_f = _resolve_antiderivative(f, k, antideriv, panels)
    xs = _grid(x)
    samples = np.asarray(big_f(np.arange(n + 1) / n), dtype=np.float64)
    return _shaped(pref * deriv_from_samples(samples, n, k + r, xs), x)
