from __future__ import annotations

import math

import numpy as np
import pytest

from opdiff.durrmeyer import DEFAULT_EXTRA, durrmeyer_eval
from opdiff.exceptions import ParameterError
from opdiff.expr import from_source
from opdiff.genuine import (
    genuine_coefficients,
    genuine_deriv,
    genuine_deriv_scaled,
    genuine_eval,
    genuine_scale,
)
from opdiff.models import JacobiParams


class TestGenuineOperator:
    def test_reproduces_linear(self, grid: np.ndarray) -> None:
        np.testing.assert_allclose(genuine_eval(np.ones_like, 10, grid), 1.0, atol=1e-12)
        np.testing.assert_allclose(genuine_eval(lambda t: t, 10, grid), grid, atol=1e-12)

    def test_interpolates_endpoints(self) -> None:
        values = genuine_eval(np.cos, 12, np.array([0.0, 1.0]))
        np.testing.assert_allclose(values, [1.0, math.cos(1.0)], atol=1e-15)

    def test_second_moment(self, grid: np.ndarray) -> None:
        n = 10
        expected = grid**2 + 2 * grid * (1 - grid) / (n + 1)
        np.testing.assert_allclose(genuine_eval(lambda t: t**2, n, grid), expected, atol=1e-12)

    def test_limit_of_jacobi_durrmeyer(self) -> None:
        # M_n with alpha = beta = -1 + eps tends to the genuine operator as eps -> 0
        f = from_source("x^5/20 - 17*x^4/144 + 7*x^3/72 - x^2/32", 0)
        x = np.linspace(0.0, 1.0, 51)
        genuine = genuine_eval(f, 10, x)
        gaps: list[float] = []
        for eps in (0.1, 0.01, 0.001):
            p = JacobiParams(alpha=eps - 1.0, beta=eps - 1.0)
            gaps.append(float(np.max(np.abs(durrmeyer_eval(f, 10, p, x) - genuine))))
        assert gaps[0] > gaps[1] > gaps[2]
        assert gaps[2] <= 0.05

    def test_doubled_nodes_agree(self, grid: np.ndarray) -> None:
        f = from_source("sin(2*pi*x) + exp(x)", 2)
        n = 20
        doubled = n + 2 * DEFAULT_EXTRA
        np.testing.assert_allclose(
            genuine_eval(f, n, grid, doubled), genuine_eval(f, n, grid), atol=1e-9
        )
        np.testing.assert_allclose(
            genuine_deriv_scaled(f, n, 2, grid, doubled),
            genuine_deriv_scaled(f, n, 2, grid),
            atol=1e-9,
        )

    def test_coefficients_need_two(self) -> None:
        with pytest.raises(ParameterError):
            genuine_coefficients(np.cos, 1)


class TestGenuineDerivatives:
    def test_scale(self) -> None:
        assert genuine_scale(10, 1) == pytest.approx(1.0)
        assert genuine_scale(10, 2) == pytest.approx(11.0 / 9.0)

    def test_second_derivative_of_square(self, grid: np.ndarray) -> None:
        n = 10
        f = from_source("x^2", 2)
        np.testing.assert_allclose(genuine_deriv_scaled(f, n, 2, grid), 2.0, atol=1e-11)
        np.testing.assert_allclose(genuine_deriv(f, n, 2, grid), 2 * (n - 1) / (n + 1), atol=1e-11)

    def test_first_derivative_matches_central_differences(self) -> None:
        f = from_source("sin(2*pi*x)", 1)
        n, h = 15, 1e-6
        x = np.array([0.2, 0.5, 0.8])
        numeric = (genuine_eval(f, n, x + h) - genuine_eval(f, n, x - h)) / (2 * h)
        np.testing.assert_allclose(genuine_deriv(f, n, 1, x), numeric, rtol=1e-6, atol=1e-6)

    def test_order_zero_is_evaluation(self, grid: np.ndarray) -> None:
        f = from_source("exp(x)", 0)
        np.testing.assert_allclose(genuine_deriv(f, 8, 0, grid), genuine_eval(f, 8, grid))

    @pytest.mark.parametrize("r", [0, 9, 11])
    def test_order_range(self, r: int, grid: np.ndarray) -> None:
        f = from_source("x^2", 11)
        with pytest.raises(ParameterError):
            genuine_deriv_scaled(f, 10, r, grid)
