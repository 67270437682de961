from __future__ import annotations

from typing import Any

import numpy as np
import pytest

from opdiff.bounds import (
    FAMILY_OF,
    check_compatible,
    decide,
    lhs_sup,
    modulus,
    required_order,
    sup_norm,
    theorem_rhs,
    uniform_grid,
    verify,
)
from opdiff.exceptions import IncompatibleTheoremError, ParameterError
from opdiff.expr import from_source
from opdiff.figures import EXAMPLES
from opdiff.models import Family, JacobiParams, OperatorSpec, RhsTerms, Theorem, Verdict
from tests.conftest import load_fixture


class TestGridEstimates:
    def test_uniform_grid(self) -> None:
        x = uniform_grid(11)
        assert x[0] == 0.0
        assert x[-1] == 1.0
        assert x.size == 11
        with pytest.raises(ParameterError):
            uniform_grid(1)

    def test_sup_norm(self) -> None:
        assert sup_norm(np.sin, 101) == pytest.approx(np.sin(1.0))
        assert sup_norm(lambda t: np.sin(2 * np.pi * t), 2001) == pytest.approx(1.0)

    def test_modulus_of_identity(self) -> None:
        estimate = modulus(lambda t: t, 0.1, 2001, np.ones_like)
        assert estimate.value_grid == pytest.approx(0.1)
        assert estimate.value_lipschitz == pytest.approx(0.1)
        assert estimate.upper == estimate.value_lipschitz

    def test_modulus_never_exceeds_lipschitz(self) -> None:
        f = from_source("sin(2*pi*x)", 1)
        for delta in (0.0, 0.013, 0.1, 0.37, 1.0):
            estimate = modulus(f, delta, 501, f.derivative(1))
            assert estimate.value_lipschitz is not None
            assert estimate.value_grid <= estimate.value_lipschitz

    def test_modulus_zero_delta(self) -> None:
        assert modulus(np.sin, 0.0, 101).value_grid == 0.0

    def test_modulus_window_is_floored(self) -> None:
        # delta just below one grid step sees no pairs
        assert modulus(lambda t: t, 0.0099, 101).value_grid == 0.0
        assert modulus(lambda t: t, 0.01, 101).value_grid == pytest.approx(0.01)

    def test_modulus_delta_range(self) -> None:
        with pytest.raises(ParameterError):
            modulus(np.sin, 1.5, 101)


class TestPairing:
    def test_family_table(self) -> None:
        assert FAMILY_OF[Theorem.THM1] is Family.BERNSTEIN
        assert FAMILY_OF[Theorem.THM3] is Family.Q_OP
        assert FAMILY_OF[Theorem.COR2] is Family.DURRMEYER
        assert FAMILY_OF[Theorem.THM6] is Family.GENUINE

    def test_required_order(self) -> None:
        assert required_order(Theorem.THM2, 2) == 2
        assert required_order(Theorem.THM4, 2) == 4
        assert required_order(Theorem.THM6, 1) == 3

    def test_incompatible_family(self) -> None:
        spec = OperatorSpec(family=Family.BERNSTEIN, n=10, r=1)
        with pytest.raises(IncompatibleTheoremError):
            check_compatible(Theorem.THM2, spec)

    def test_corollaries_need_classical_weight(self) -> None:
        spec = OperatorSpec(
            family=Family.DURRMEYER, n=10, r=1, params=JacobiParams(alpha=0.5, beta=0.0)
        )
        check_compatible(Theorem.THM4, spec)
        with pytest.raises(IncompatibleTheoremError):
            check_compatible(Theorem.COR1, spec)


class TestRightHandSide:
    def test_thm1_terms(self) -> None:
        f = from_source("x^3", 4)
        spec = OperatorSpec(family=Family.BERNSTEIN, n=10, r=2)
        rhs = theorem_rhs(Theorem.THM1, spec, f, 1001)
        # (r-1) r / (2n) ||f''|| = 1/10 * 6
        assert rhs.supnorm_term == pytest.approx(0.6)
        assert rhs.modulus_delta == pytest.approx(0.2)
        assert rhs.modulus_term_grid == pytest.approx(6 * 0.2)
        assert rhs.extra_terms == ()

    def test_thm6_endpoint_term(self) -> None:
        f = from_source("x^4", 4)
        spec = OperatorSpec(family=Family.GENUINE, n=10, r=2)
        rhs = theorem_rhs(Theorem.THM6, spec, f, 1001)
        assert [t.name for t in rhs.extra_terms] == ["endpoint"]
        assert rhs.extra_terms[0].coefficient == pytest.approx(2 / 12)
        assert rhs.extra_terms[0].norm == pytest.approx(24.0)
        assert rhs.supnorm_term == pytest.approx(0.25 * 11 / (121 - 4) * 24.0)

    def test_cor2_scale_defect(self) -> None:
        f = from_source("x^4", 4)
        spec = OperatorSpec(family=Family.DURRMEYER, n=10, r=2)
        rhs = theorem_rhs(Theorem.COR2, spec, f, 1001)
        assert rhs.extra_terms[0].name == "scale_defect"
        assert rhs.extra_terms[0].coefficient == pytest.approx(6 / 12)
        assert rhs.total_grid <= rhs.total_lipschitz

    def test_insufficient_order(self) -> None:
        spec = OperatorSpec(family=Family.DURRMEYER, n=10, r=2)
        with pytest.raises(ParameterError):
            theorem_rhs(Theorem.THM4, spec, from_source("sin(x)", 3))


class TestDecide:
    RHS = RhsTerms(supnorm_term=1.0, modulus_term_grid=0.5, modulus_term_lipschitz=1.0)

    def test_verdicts(self) -> None:
        assert decide(1.4, self.RHS) is Verdict.HOLDS
        assert decide(1.9, self.RHS) is Verdict.HOLDS_LOOSE
        assert decide(2.1, self.RHS) is Verdict.VIOLATED

    def test_rounding_against_zero_bound(self) -> None:
        zero = RhsTerms(supnorm_term=0.0, modulus_term_grid=0.0, modulus_term_lipschitz=0.0)
        assert decide(1e-14, zero) is Verdict.HOLDS
        assert decide(1e-6, zero) is Verdict.VIOLATED


class TestVerify:
    def test_identity_under_bernstein(self) -> None:
        spec = OperatorSpec(family=Family.BERNSTEIN, n=20, r=1)
        report = verify(Theorem.THM1, spec, from_source("x", 3))
        assert report.verdict is Verdict.HOLDS
        assert report.lhs_sup <= 1e-12

    def test_durrmeyer_example_function(self) -> None:
        spec = OperatorSpec(family=Family.DURRMEYER, n=50, r=2)
        f = from_source(EXAMPLES[3].source, 4)
        report = verify(Theorem.THM4, spec, f)
        assert report.verdict is not Verdict.VIOLATED
        assert report.rhs_total_grid <= report.rhs_total_lipschitz

    def test_incompatible(self) -> None:
        spec = OperatorSpec(family=Family.BERNSTEIN, n=20, r=1)
        with pytest.raises(IncompatibleTheoremError):
            verify(Theorem.THM2, spec, from_source("x", 3))

    def test_lhs_is_scaled_for_scaled_theorems(self) -> None:
        spec = OperatorSpec(family=Family.GENUINE, n=20, r=1)
        f = from_source("x", 3)
        assert lhs_sup(Theorem.THM6, spec, f, 101) <= 1e-10

    def test_refinement_check(self) -> None:
        spec = OperatorSpec(family=Family.KANTOROVICH, n=30, r=1)
        report = verify(
            Theorem.THM2,
            spec,
            from_source("sin(2*pi*x)", 3),
            201,
            norm_grid_points=1001,
            check_refinement=True,
        )
        assert report.refinement_stable is not None
        assert report.verdict is not Verdict.VIOLATED

    def test_document_layout(self) -> None:
        spec = OperatorSpec(family=Family.BERNSTEIN, n=20, r=2)
        doc = verify(Theorem.THM1, spec, from_source("sin(x)", 3), 101).to_document()
        frozen = {
            "theorem",
            "family",
            "n",
            "r",
            "alpha",
            "beta",
            "k",
            "lhs_sup",
            "rhs",
            "verdict",
            "grid_points",
            "version",
        }
        assert frozen <= set(doc)
        assert set(doc["rhs"]) == {
            "supnorm_term",
            "modulus_term_grid",
            "modulus_term_lipschitz",
            "extra_terms",
        }
        assert doc["version"] == "1.0"


@pytest.mark.slow
class TestCertificationSweep:
    def test_every_case_holds(self, sweep_cases: list[dict[str, Any]]) -> None:
        sweep = load_fixture("sweep.json")
        assert len(sweep_cases) >= 90
        for case in sweep_cases:
            theorem = Theorem(case["theorem"])
            spec = OperatorSpec(
                family=Family(case["family"]),
                n=case["n"],
                r=case["r"],
                k=case.get("k", 0),
                params=JacobiParams(alpha=case.get("alpha", 0.0), beta=case.get("beta", 0.0)),
            )
            f = from_source(case["f"], case["r"] + 2)
            report = verify(
                theorem,
                spec,
                f,
                sweep["grid_points"],
                norm_grid_points=sweep["norm_grid_points"],
            )
            assert report.verdict in (Verdict.HOLDS, Verdict.HOLDS_LOOSE), case
