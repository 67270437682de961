from __future__ import annotations

import logging

import numpy as np
import pytest

from opdiff.durrmeyer import (
    DEFAULT_EXTRA,
    abel_prefactor,
    durrmeyer_c,
    durrmeyer_deriv,
    durrmeyer_deriv_direct,
    durrmeyer_eval,
    durrmeyer_moment,
    durrmeyer_scale,
    durrmeyer_scaled_difference_via_functionals,
    functional_a,
    functional_a_bound,
    functional_a_delta,
    functional_b,
    functional_b_all,
    functional_c,
    functional_c_all,
    functional_moments,
    functional_moments_numeric,
    moment_adjudication,
    node_count,
)
from opdiff.exceptions import ParameterError
from opdiff.expr import from_source
from opdiff.models import Family, JacobiParams, OperatorSpec
from opdiff.operators import difference
from opdiff.special import beta

PARAMS = [
    JacobiParams(),
    JacobiParams(alpha=0.5, beta=-0.5),
    JacobiParams(alpha=2.0, beta=0.25),
]


class TestDurrmeyerOperator:
    @pytest.mark.parametrize("p", PARAMS)
    def test_preserves_constants(self, p: JacobiParams, grid: np.ndarray) -> None:
        np.testing.assert_allclose(durrmeyer_eval(np.ones_like, 12, p, grid), 1.0, atol=1e-12)

    @pytest.mark.parametrize("p", PARAMS)
    def test_first_moment(self, p: JacobiParams, grid: np.ndarray) -> None:
        n = 12
        expected = (n * grid + p.alpha + 1) / (n + p.alpha + p.beta + 2)
        np.testing.assert_allclose(durrmeyer_eval(lambda t: t, n, p, grid), expected, atol=1e-12)

    @pytest.mark.parametrize("p", PARAMS)
    def test_weights_sum_to_beta(self, p: JacobiParams) -> None:
        total = sum(durrmeyer_c(10, k, p) for k in range(11))
        assert total == pytest.approx(beta(p.alpha + 1, p.beta + 1), rel=1e-12)

    def test_node_count_grows_near_singular_weights(self) -> None:
        assert node_count(20, JacobiParams()) == 70
        assert node_count(20, JacobiParams(alpha=-0.95)) == 280

    @pytest.mark.parametrize("p", [*PARAMS, JacobiParams(alpha=-0.95, beta=0.0)])
    def test_doubled_nodes_agree(self, p: JacobiParams, grid: np.ndarray) -> None:
        n, r = 20, 2
        doubled = n + 2 * DEFAULT_EXTRA
        assert node_count(n, p, doubled) == 2 * node_count(n, p)
        f = from_source("sin(2*pi*x) + exp(x)", r)
        np.testing.assert_allclose(
            durrmeyer_eval(f, n, p, grid, doubled), durrmeyer_eval(f, n, p, grid), atol=1e-9
        )
        np.testing.assert_allclose(
            durrmeyer_deriv(f, n, r, p, grid, doubled),
            durrmeyer_deriv(f, n, r, p, grid),
            atol=1e-9,
        )
        np.testing.assert_allclose(
            functional_b_all(f, n, r, p, doubled), functional_b_all(f, n, r, p), atol=1e-9
        )
        np.testing.assert_allclose(
            functional_c_all(f, n, r, p, doubled), functional_c_all(f, n, r, p), atol=1e-9
        )

    def test_invalid_degree(self, grid: np.ndarray) -> None:
        with pytest.raises(ParameterError):
            durrmeyer_eval(np.cos, 0, JacobiParams(), grid)
        with pytest.raises(ParameterError):
            durrmeyer_c(3, 4, JacobiParams())


class TestMoments:
    @pytest.mark.parametrize("p", PARAMS)
    @pytest.mark.parametrize("r", [0, 1, 2, 3, 4])
    def test_closed_form_matches_quadrature(self, p: JacobiParams, r: int) -> None:
        n = 15
        x = np.array([0.0, 0.3, 0.7, 1.0])
        quad = durrmeyer_eval(lambda t, r=r: t**r, n, p, x)
        closed = [durrmeyer_moment(n, r, p, float(v)) for v in x]
        np.testing.assert_allclose(quad, closed, rtol=1e-9, atol=1e-12)

    def test_classical_second_moment(self) -> None:
        n, x = 10, 0.4
        expected = (n * (n - 1) * x**2 + 4 * n * x + 2) / ((n + 2) * (n + 3))
        assert durrmeyer_moment(n, 2, JacobiParams(), x) == pytest.approx(expected, rel=1e-14)

    def test_adjudication(self, caplog: pytest.LogCaptureFixture) -> None:
        with caplog.at_level(logging.INFO, logger="opdiff.durrmeyer"):
            result = moment_adjudication(10, 2, JacobiParams(), 0.3)
        assert result.corrected_error < 1e-9
        assert result.printed_error > 1e-3
        assert result.constant_ratio == pytest.approx(3.0)
        assert any("printed moment form deviates" in rec.message for rec in caplog.records)

    def test_forms_agree_for_first_moment(self) -> None:
        p = JacobiParams(alpha=0.5, beta=1.0)
        assert durrmeyer_moment(8, 1, p, 0.2, "printed") == pytest.approx(
            durrmeyer_moment(8, 1, p, 0.2, "corrected")
        )


class TestDerivatives:
    @pytest.mark.parametrize("p", PARAMS)
    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_abel_and_direct_routes_agree(self, p: JacobiParams, r: int, grid: np.ndarray) -> None:
        f = from_source("sin(2*pi*x) + x^3", r)
        abel = durrmeyer_deriv(f, 20, r, p, grid)
        direct = durrmeyer_deriv_direct(f, 20, r, p, grid)
        scale = float(np.max(np.abs(abel)))
        np.testing.assert_allclose(direct, abel, atol=1e-8 * scale)

    def test_derivative_of_first_moment(self, grid: np.ndarray) -> None:
        p = JacobiParams(alpha=0.5, beta=-0.5)
        n = 12
        got = durrmeyer_deriv(from_source("x", 1), n, 1, p, grid)
        np.testing.assert_allclose(got, n / (n + p.alpha + p.beta + 2), atol=1e-12)

    def test_scale_inverts_prefactor(self) -> None:
        p = JacobiParams(alpha=0.5, beta=1.5)
        assert durrmeyer_scale(30, 3, p) * abel_prefactor(30, 3, p) == pytest.approx(1.0)

    def test_order_above_degree(self, grid: np.ndarray) -> None:
        with pytest.raises(ParameterError):
            durrmeyer_deriv(from_source("x", 5), 3, 4, JacobiParams(), grid)


class TestFunctionals:
    @pytest.mark.parametrize("p", [JacobiParams(), JacobiParams(alpha=0.5, beta=-0.5)])
    def test_moments_closed_form(self, p: JacobiParams) -> None:
        n, r = 12, 2
        for k in range(n - r + 1):
            closed = functional_moments(n, r, k, p)
            numeric = functional_moments_numeric(n, r, k, p)
            for name in ("b_e0", "b_e1", "b_e2", "c_e0", "c_e1", "c_e2"):
                assert getattr(numeric, name) == pytest.approx(getattr(closed, name), rel=1e-10)
            assert closed.b_variance >= 0.0
            assert closed.c_variance >= 0.0

    @pytest.mark.parametrize("p", [JacobiParams(), JacobiParams(alpha=0.5, beta=-0.5)])
    @pytest.mark.parametrize(("n", "r"), [(12, 2), (20, 1), (20, 2), (20, 3)])
    @pytest.mark.parametrize(("src", "second"), [("x^2", 2.0), ("sin(2*pi*x)", 4 * np.pi**2)])
    def test_variance_bounds_mean_value_gap(
        self, p: JacobiParams, n: int, r: int, src: str, second: float
    ) -> None:
        # |F(phi) - phi(F(e_1))| <= (F(e_2) - F(e_1)^2) ||phi''|| / 2, with equality for e_2
        phi = from_source(src, 0)
        b_all = functional_b_all(phi, n, r, p)
        c_all = functional_c_all(phi, n, r, p)
        for k in range(n - r + 1):
            m = functional_moments(n, r, k, p)
            assert abs(b_all[k] - phi(m.b_e1)) <= m.b_variance * second / 2 + 1e-10
            assert abs(c_all[k] - phi(m.c_e1)) <= m.c_variance * second / 2 + 1e-10
            if src == "x^2":
                assert b_all[k] - phi(m.b_e1) == pytest.approx(m.b_variance, abs=1e-12)
                assert c_all[k] - phi(m.c_e1) == pytest.approx(m.c_variance, abs=1e-12)

    def test_a_is_b_minus_c(self) -> None:
        p = JacobiParams(alpha=0.5, beta=-0.5)
        phi = np.cos
        a = functional_a(phi, 10, 2, 3, p)
        assert a == pytest.approx(functional_b(phi, 10, 2, 3, p) - functional_c(phi, 10, 2, 3, p))

    def test_a_vanishes_on_constants(self) -> None:
        assert functional_a(np.ones_like, 10, 2, 4, JacobiParams()) == pytest.approx(
            0.0, abs=1e-13
        )

    @pytest.mark.parametrize("p", [JacobiParams(), JacobiParams(alpha=0.5, beta=-0.5)])
    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_a_within_its_bound(self, p: JacobiParams, r: int) -> None:
        n = 20
        phi = from_source("sin(2*pi*x)", 2)
        second = float(np.max(np.abs(phi.derivative(2)(np.linspace(0.0, 1.0, 2001)))))
        delta = functional_a_delta(n, r, p)
        # omega(sin(2 pi x), delta) <= 2 pi delta
        bound = functional_a_bound(second, 2 * np.pi * delta, n, r, p)
        for k in range(n - r + 1):
            assert abs(functional_a(phi, n, r, k, p)) <= bound

    def test_index_range(self) -> None:
        with pytest.raises(ParameterError):
            functional_b(np.cos, 10, 2, 9, JacobiParams())

    @pytest.mark.parametrize("p", [JacobiParams(), JacobiParams(alpha=0.5, beta=-0.5)])
    def test_scaled_difference_via_functionals(self, p: JacobiParams, grid: np.ndarray) -> None:
        f = from_source("x^5/20 - 3*x^4/32 + 13*x^3/192 - 3*x^2/128", 2)
        spec = OperatorSpec(family=Family.DURRMEYER, n=30, r=2, params=p)
        via = durrmeyer_scaled_difference_via_functionals(f, 30, 2, p, grid)
        direct = difference(spec, f, grid, scaled=True)
        np.testing.assert_allclose(np.abs(via), direct, rtol=1e-9, atol=1e-13)
