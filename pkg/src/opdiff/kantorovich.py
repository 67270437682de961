"""Kantorovich operators K_n f(x) = (n+1) sum_k p_{n,k}(x) int_{k/(n+1)}^{(k+1)/(n+1)} f."""

from __future__ import annotations

import numpy as np

from opdiff.bernstein import basis_matrix, deriv_from_samples
from opdiff.exceptions import ParameterError
from opdiff.quadrature import PANEL_POINTS, Evaluable, FloatArray, panel_integrals


def panel_means(f: Evaluable, n: int, m: int = PANEL_POINTS) -> FloatArray:
    """(n+1) times the integral of f over each panel [i/(n+1), (i+1)/(n+1)], i = 0..n."""
    edges = np.arange(n + 2, dtype=np.float64) / (n + 1)
    out: FloatArray = (n + 1) * panel_integrals(f, edges, m)
    return out


def kantorovich_eval(f: Evaluable, n: int, x: FloatArray, m: int = PANEL_POINTS) -> FloatArray:
    if n < 1:
        raise ParameterError(f"K_n needs n >= 1, got {n}")
    xs = np.asarray(x, dtype=np.float64)
    values = basis_matrix(n, np.atleast_1d(xs)) @ panel_means(f, n, m)
    return values.reshape(xs.shape)


def kantorovich_deriv(
    f: Evaluable, n: int, r: int, x: FloatArray, m: int = PANEL_POINTS
) -> FloatArray:
    """(K_n f)^(r) = (n+1) n^(falling r) sum_i p_{n-r,i}(x) Delta^r g(i), g the panel integrals.

    Equal to (B_{n+1} F)^(r+1) for F' = f, without building F.
    """
    if r < 0 or r > n:
        raise ParameterError(f"(K_n f)^(r) needs 0 <= r <= n, got r={r}, n={n}")
    if r == 0:
        return kantorovich_eval(f, n, x, m)
    xs = np.asarray(x, dtype=np.float64)
    values = deriv_from_samples(panel_means(f, n, m), n, r, np.atleast_1d(xs))
    return values.reshape(xs.shape)
