"""Family dispatch: L_n f, (L_n f)^(r), L_{n-r}(f^(r)) and E_{n,r}(f; x) for any OperatorSpec."""

from __future__ import annotations

import numpy as np

from opdiff.bernstein import bernstein_deriv, bernstein_eval, q_op_deriv, q_op_eval
from opdiff.durrmeyer import DEFAULT_EXTRA, durrmeyer_deriv, durrmeyer_eval, durrmeyer_scale
from opdiff.expr import SmoothFn
from opdiff.genuine import genuine_deriv, genuine_deriv_scaled, genuine_eval, genuine_scale
from opdiff.kantorovich import kantorovich_deriv, kantorovich_eval
from opdiff.models import Family, OperatorSpec
from opdiff.quadrature import Evaluable, FloatArray, antiderivative


def apply(
    spec: OperatorSpec,
    f: Evaluable,
    x: FloatArray,
    *,
    quad_extra: int = DEFAULT_EXTRA,
    panels: int = 128,
    antideriv: Evaluable | None = None,
) -> FloatArray:
    """L_n f at x."""
    xs = np.asarray(x, dtype=np.float64)
    n = spec.n
    match spec.family:
        case Family.BERNSTEIN:
            return bernstein_eval(f, n, xs)
        case Family.KANTOROVICH:
            return kantorovich_eval(f, n, xs)
        case Family.Q_OP:
            return np.asarray(q_op_eval(f, n, spec.k, xs, antideriv, panels))
        case Family.DURRMEYER:
            return durrmeyer_eval(f, n, spec.params, xs, quad_extra)
        case Family.GENUINE:
            return genuine_eval(f, n, xs, quad_extra)
    raise ValueError(f"unknown family {spec.family}")


def scale_factor(spec: OperatorSpec) -> float:
    """Multiplier turning (L_n f)^(r) into the scaled derivative; 1 for unscaled families."""
    if spec.r == 0:
        return 1.0
    if spec.family is Family.DURRMEYER:
        return durrmeyer_scale(spec.n, spec.r, spec.params)
    if spec.family is Family.GENUINE:
        return genuine_scale(spec.n, spec.r)
    return 1.0


def derivative(
    spec: OperatorSpec,
    f: SmoothFn,
    x: FloatArray,
    *,
    scaled: bool = False,
    quad_extra: int = DEFAULT_EXTRA,
    panels: int = 128,
) -> FloatArray:
    """(L_n f)^(r), times scale_factor(spec) when ``scaled``."""
    xs = np.asarray(x, dtype=np.float64)
    n, r = spec.n, spec.r
    if r == 0:
        return apply(spec, f, xs, quad_extra=quad_extra, panels=panels)
    match spec.family:
        case Family.BERNSTEIN:
            return bernstein_deriv(f, n, r, xs)
        case Family.KANTOROVICH:
            return kantorovich_deriv(f, n, r, xs)
        case Family.Q_OP:
            return np.asarray(q_op_deriv(f, n, spec.k, r, xs, panels=panels))
        case Family.DURRMEYER:
            values = durrmeyer_deriv(f, n, r, spec.params, xs, quad_extra)
            return values * durrmeyer_scale(n, r, spec.params) if scaled else values
        case Family.GENUINE:
            if scaled:
                return genuine_deriv_scaled(f, n, r, xs, quad_extra)
            return genuine_deriv(f, n, r, xs, quad_extra)
    raise ValueError(f"unknown family {spec.family}")


def lower(
    spec: OperatorSpec,
    f: SmoothFn,
    x: FloatArray,
    *,
    quad_extra: int = DEFAULT_EXTRA,
    panels: int = 128,
) -> FloatArray:
    """L_{n-r}(f^(r)) at x."""
    fr = f.derivative(spec.r)
    antideriv: Evaluable | None = None
    if spec.family is Family.Q_OP:
        # f^(r-k) is itself an order-k antiderivative of f^(r)
        if spec.r >= spec.k:
            antideriv = f.derivative(spec.r - spec.k)
        else:
            antideriv = antiderivative(fr, spec.k, panels)
    return apply(
        spec.lowered(), fr, x, quad_extra=quad_extra, panels=panels, antideriv=antideriv
    )


def difference(
    spec: OperatorSpec,
    f: SmoothFn,
    x: FloatArray,
    *,
    scaled: bool = False,
    quad_extra: int = DEFAULT_EXTRA,
    panels: int = 128,
) -> FloatArray:
    """E_{n,r}(f; x) = |(L_n f)^(r) - L_{n-r}(f^(r))|, optionally with the scaled derivative."""
    lhs = derivative(spec, f, x, scaled=scaled, quad_extra=quad_extra, panels=panels)
    rhs = lower(spec, f, x, quad_extra=quad_extra, panels=panels)
    out: FloatArray = np.abs(lhs - rhs)
    return out
