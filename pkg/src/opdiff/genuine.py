"""Genuine Bernstein-Durrmeyer operators U_n, the alpha, beta -> -1 limit of M_n^(alpha,beta).

    U_n f(x) = (1-x)^n f(0) + x^n f(1)
               + (n-1) sum_{k=1}^{n-1} p_{n,k}(x) int_0^1 f(t) p_{n-2,k-1}(t) dt
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as sc

from opdiff.bernstein import basis_matrix
from opdiff.exceptions import ParameterError
from opdiff.expr import SmoothFn
from opdiff.quadrature import Evaluable, FloatArray, gen_basis_integrals

DEFAULT_EXTRA = 50


def genuine_coefficients(f: Evaluable, n: int, extra: int = DEFAULT_EXTRA) -> FloatArray:
    if n < 2:
        raise ParameterError(f"U_n needs n >= 2, got {n}")
    coef = np.empty(n + 1)
    ends = np.asarray(f(np.array([0.0, 1.0])), dtype=np.float64)
    coef[0], coef[n] = ends[0], ends[1]
    k = np.arange(n - 1, dtype=np.float64)
    coef[1:n] = (n - 1) * gen_basis_integrals(f, float(n - 2), k, n + extra)
    return coef


def genuine_eval(f: Evaluable, n: int, x: FloatArray, extra: int = DEFAULT_EXTRA) -> FloatArray:
    xs = np.asarray(x, dtype=np.float64)
    values = basis_matrix(n, np.atleast_1d(xs)) @ genuine_coefficients(f, n, extra)
    return values.reshape(xs.shape)


def genuine_scale(n: int, r: int) -> float:
    """(n+r-1)! (n-r)! / ((n-1)! n!)."""
    return math.exp(sc.gammaln(n + r) + sc.gammaln(n - r + 1) - sc.gammaln(n) - sc.gammaln(n + 1))


def _check_order(n: int, r: int) -> None:
    if not 1 <= r <= n - 2:
        raise ParameterError(f"genuine derivative needs 1 <= r <= n - 2, got r={r}, n={n}")


def genuine_deriv_scaled(
    f: SmoothFn, n: int, r: int, x: FloatArray, extra: int = DEFAULT_EXTRA
) -> FloatArray:
    """genuine_scale(n, r) (U_n f)^(r) = (n+r-1) sum_k p_{n-r,k}(x) int p_{n+r-2,k+r-1} f^(r)."""
    _check_order(n, r)
    xs = np.asarray(x, dtype=np.float64)
    k = np.arange(n - r + 1, dtype=np.float64)
    integrals = gen_basis_integrals(f.derivative(r), float(n + r - 2), k + r - 1, n + extra)
    values = (n + r - 1) * (basis_matrix(n - r, np.atleast_1d(xs)) @ integrals)
    return values.reshape(xs.shape)


def genuine_deriv(
    f: SmoothFn, n: int, r: int, x: FloatArray, extra: int = DEFAULT_EXTRA
) -> FloatArray:
    """Unscaled (U_n f)^(r)."""
    if r == 0:
        return genuine_eval(f, n, x, extra)
    return genuine_deriv_scaled(f, n, r, x, extra) / genuine_scale(n, r)
