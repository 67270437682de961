"""Sup-norms and moduli of continuity on grids, theorem right-hand sides and verdicts."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from opdiff.exceptions import IncompatibleTheoremError, ParameterError
from opdiff.expr import SmoothFn
from opdiff.models import (
    BoundReport,
    Family,
    ModulusEstimate,
    NamedTerm,
    OperatorSpec,
    RhsTerms,
    Theorem,
    Verdict,
)
from opdiff.operators import difference
from opdiff.quadrature import Evaluable, FloatArray

logger = logging.getLogger(__name__)

RELATIVE_SLACK = 1e-9
REFINEMENT_TOLERANCE = 1e-3

FAMILY_OF: dict[Theorem, Family] = {
    Theorem.THM1: Family.BERNSTEIN,
    Theorem.THM2: Family.KANTOROVICH,
    Theorem.THM3: Family.Q_OP,
    Theorem.THM4: Family.DURRMEYER,
    Theorem.THM5: Family.DURRMEYER,
    Theorem.COR1: Family.DURRMEYER,
    Theorem.COR2: Family.DURRMEYER,
    Theorem.THM6: Family.GENUINE,
}

SCALED = frozenset({Theorem.THM4, Theorem.COR1, Theorem.THM6})


def uniform_grid(grid_points: int) -> FloatArray:
    if grid_points < 2:
        raise ParameterError(f"a grid needs at least 2 points, got {grid_points}")
    return np.linspace(0.0, 1.0, grid_points)


def sup_norm(f: Evaluable, grid_points: int) -> float:
    """max |f| over the uniform closed grid; a lower estimate of the sup-norm."""
    return float(np.max(np.abs(f(uniform_grid(grid_points)))))


def modulus(
    f: Evaluable, delta: float, grid_points: int, f_prime: Evaluable | None = None
) -> ModulusEstimate:
    """Grid estimate of omega(f, delta) and, with f', the Lipschitz estimate ||f'|| delta.

    The grid value uses pairs at most floor(delta (N-1)) cells apart, so it never
    overshoots the true modulus.
    """
    if not 0.0 <= delta <= 1.0:
        raise ParameterError(f"modulus needs 0 <= delta <= 1, got {delta}")
    values = np.asarray(f(uniform_grid(grid_points)), dtype=np.float64)
    width = min(math.floor(delta * (grid_points - 1) + 1e-9), grid_points - 1)
    value_grid = 0.0
    if width > 0:
        value_grid = float(np.max(np.ptp(sliding_window_view(values, width + 1), axis=1)))
    value_lipschitz = None
    if f_prime is not None:
        value_lipschitz = max(sup_norm(f_prime, grid_points) * delta, value_grid)
    return ModulusEstimate(
        delta=delta,
        grid_points=grid_points,
        value_grid=value_grid,
        value_lipschitz=value_lipschitz,
    )


def required_order(theorem: Theorem, r: int) -> int:
    if theorem in (Theorem.THM1, Theorem.THM2, Theorem.THM3):
        return r
    return r + 2


def check_compatible(theorem: Theorem, spec: OperatorSpec) -> None:
    family = FAMILY_OF[theorem]
    if spec.family is not family:
        raise IncompatibleTheoremError(
            f"{theorem.value} covers {family.value} operators, not {spec.family.value}"
        )
    if theorem in (Theorem.COR1, Theorem.COR2) and not spec.params.is_classical:
        raise IncompatibleTheoremError(f"{theorem.value} needs alpha = beta = 0")


@dataclass(frozen=True)
class _Shape:
    """Coefficients of one theorem's right-hand side for a given spec."""

    main_coefficient: float
    main_order: int
    delta: float
    extras: tuple[tuple[str, float, int], ...] = ()


def _shape(theorem: Theorem, spec: OperatorSpec) -> _Shape:
    n, r, k = spec.n, spec.r, spec.k
    a, b = spec.params.alpha, spec.params.beta
    match theorem:
        case Theorem.THM1:
            return _Shape((r - 1) * r / (2 * n), r, r / n)
        case Theorem.THM2:
            return _Shape((r + 1) * r / (2 * (n + 1)), r, (r + 1) / (n + 1))
        case Theorem.THM3:
            return _Shape((2 * k + r - 1) * r / (2 * n), r, (k + r) / n)
        case Theorem.THM4 | Theorem.THM5:
            s = n + a + b + 3.0
            t = n + 2.0 + a + b
            extras: tuple[tuple[str, float, int], ...] = ()
            if theorem is Theorem.THM5:
                extras = (("scale_defect", r * (a + b + r + 1) / (n + a + b + 2), r),)
            return _Shape(
                0.25 * s / (s * s - r * r),
                r + 2,
                r * (n - r + abs(b - a)) / (t * t - r * r),
                extras,
            )
        case Theorem.COR1 | Theorem.COR2:
            extras = ()
            if theorem is Theorem.COR2:
                extras = (("scale_defect", r * (r + 1) / (n + 2), r),)
            return _Shape(
                (n + 3) / (4 * ((n + 3) ** 2 - r * r)),
                r + 2,
                r * (n - r) / ((n + 2) ** 2 - r * r),
                extras,
            )
        case Theorem.THM6:
            return _Shape(
                0.25 * (n + 1) / ((n + 1) ** 2 - r * r),
                r + 2,
                r * (n - 2 - r) / (n * n - r * r),
                (("endpoint", r / (n + r), r + 1),),
            )
    raise ValueError(f"unknown theorem {theorem}")


def theorem_rhs(
    theorem: Theorem, spec: OperatorSpec, f: SmoothFn, grid_points: int = 2001
) -> RhsTerms:
    """Right-hand side of the theorem's bound, with grid and Lipschitz modulus variants."""
    need = required_order(theorem, spec.r)
    if f.max_order < need:
        raise ParameterError(
            f"{theorem.value} needs derivatives up to order {need}, f carries {f.max_order}"
        )
    shape = _shape(theorem, spec)
    main_norm = sup_norm(f.derivative(shape.main_order), grid_points)
    f_prime = f.derivative(spec.r + 1) if f.max_order > spec.r else None
    omega = modulus(f.derivative(spec.r), shape.delta, grid_points, f_prime)
    extras = []
    for name, coefficient, order in shape.extras:
        norm = sup_norm(f.derivative(order), grid_points)
        extras.append(
            NamedTerm(name=name, coefficient=coefficient, norm=norm, value=coefficient * norm)
        )
    return RhsTerms(
        supnorm_term=shape.main_coefficient * main_norm,
        modulus_term_grid=omega.value_grid,
        modulus_term_lipschitz=omega.upper,
        extra_terms=tuple(extras),
        modulus_delta=shape.delta,
    )


def decide(lhs: float, rhs: RhsTerms, atol: float = 1e-12) -> Verdict:
    if lhs <= rhs.total_grid * (1 + RELATIVE_SLACK) + atol:
        return Verdict.HOLDS
    if lhs <= rhs.total_lipschitz * (1 + RELATIVE_SLACK) + atol:
        return Verdict.HOLDS_LOOSE
    return Verdict.VIOLATED


def lhs_sup(
    theorem: Theorem,
    spec: OperatorSpec,
    f: SmoothFn,
    grid_points: int = 501,
    *,
    quad_extra: int = 50,
    panels: int = 128,
) -> float:
    """max over the grid of the theorem's derivative difference."""
    errors = difference(
        spec,
        f,
        uniform_grid(grid_points),
        scaled=theorem in SCALED,
        quad_extra=quad_extra,
        panels=panels,
    )
    return float(np.max(errors))


def _close(a: float, b: float, atol: float) -> bool:
    return abs(a - b) <= REFINEMENT_TOLERANCE * max(abs(a), abs(b)) + atol


def verify(
    theorem: Theorem,
    spec: OperatorSpec,
    f: SmoothFn,
    grid_points: int = 501,
    *,
    norm_grid_points: int = 2001,
    quad_extra: int = 50,
    panels: int = 128,
    atol: float = 1e-12,
    check_refinement: bool = False,
) -> BoundReport:
    """Measure the left side on the grid, assemble the right side, and decide."""
    check_compatible(theorem, spec)
    rhs = theorem_rhs(theorem, spec, f, norm_grid_points)
    lhs = lhs_sup(theorem, spec, f, grid_points, quad_extra=quad_extra, panels=panels)
    verdict = decide(lhs, rhs, atol)

    stable: bool | None = None
    if check_refinement:
        fine_rhs = theorem_rhs(theorem, spec, f, 2 * norm_grid_points - 1)
        fine_lhs = lhs_sup(
            theorem, spec, f, 2 * grid_points - 1, quad_extra=quad_extra, panels=panels
        )
        stable = _close(lhs, fine_lhs, atol) and _close(
            rhs.modulus_term_grid, fine_rhs.modulus_term_grid, atol
        )
        if not stable:
            logger.warning(
                "%s on %s is not refinement stable: lhs %.6e -> %.6e, omega %.6e -> %.6e",
                theorem.value,
                spec.label(),
                lhs,
                fine_lhs,
                rhs.modulus_term_grid,
                fine_rhs.modulus_term_grid,
            )

    if verdict is Verdict.VIOLATED:
        logger.warning(
            "%s violated on %s: lhs %.6e > rhs %.6e",
            theorem.value,
            spec.label(),
            lhs,
            rhs.total_lipschitz,
        )
    elif verdict is Verdict.HOLDS_LOOSE:
        logger.info("%s holds only with the Lipschitz modulus on %s", theorem.value, spec.label())

    return BoundReport(
        theorem=theorem,
        spec=spec,
        lhs_sup=lhs,
        rhs=rhs,
        rhs_total_grid=rhs.total_grid,
        rhs_total_lipschitz=rhs.total_lipschitz,
        verdict=verdict,
        grid_points=grid_points,
        norm_grid_points=norm_grid_points,
        refinement_stable=stable,
    )
