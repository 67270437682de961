"""Durrmeyer operators with Jacobi weights M_n^(alpha,beta) and the functionals A, B, C.

    M_n f(x) = sum_k p_{n,k}(x) (1/c_{n,k}) int_0^1 p_{n,k}(t) t^alpha (1-t)^beta f(t) dt

alpha = beta = 0 is the classical Durrmeyer operator.
"""

from __future__ import annotations

import logging
import math
from typing import Literal

import numpy as np
from scipy import special as sc

from opdiff.bernstein import basis_matrix
from opdiff.exceptions import ParameterError
from opdiff.expr import SmoothFn
from opdiff.models import FunctionalMoments, JacobiParams, MomentAdjudication
from opdiff.quadrature import Evaluable, FloatArray, gen_basis_integrals, jacobi
from opdiff.special import falling, log_falling, log_gen_binom, log_rising, rising

logger = logging.getLogger(__name__)

DEFAULT_EXTRA = 50
NEAR_LIMIT = -0.9

MomentForm = Literal["corrected", "printed"]


def node_count(n: int, p: JacobiParams, extra: int = DEFAULT_EXTRA) -> int:
    """n + extra nodes, four times that when a weight exponent is close to -1."""
    m = n + extra
    if p.alpha <= NEAR_LIMIT or p.beta <= NEAR_LIMIT:
        m *= 4
    return m


def _log_c(n: int, k: FloatArray, p: JacobiParams) -> FloatArray:
    out: FloatArray = log_gen_binom(float(n), k) + sc.betaln(
        k + p.alpha + 1.0, n - k + p.beta + 1.0
    )
    return out


def durrmeyer_c(n: int, k: int, p: JacobiParams) -> float:
    """c_{n,k} = int_0^1 p_{n,k}(t) t^alpha (1-t)^beta dt = C(n,k) B(k+alpha+1, n-k+beta+1)."""
    if not 0 <= k <= n:
        raise ParameterError(f"durrmeyer_c needs 0 <= k <= n, got n={n}, k={k}")
    return math.exp(float(_log_c(n, np.array([float(k)]), p)[0]))


def durrmeyer_coefficients(
    f: Evaluable, n: int, p: JacobiParams, extra: int = DEFAULT_EXTRA
) -> FloatArray:
    """The normalized weighted moments (1/c_{n,k}) int p_{n,k} w f, k = 0..n."""
    if n < 0:
        raise ParameterError(f"M_n needs n >= 0, got {n}")
    rule = jacobi(p.alpha, p.beta, node_count(n, p, extra))
    weighted = rule.weights * np.asarray(f(rule.nodes), dtype=np.float64)
    moments = weighted @ basis_matrix(n, rule.nodes)
    log_c = _log_c(n, np.arange(n + 1, dtype=np.float64), p)
    out: FloatArray = moments * np.exp(-log_c)
    return out


def _evaluate(
    f: Evaluable, n: int, p: JacobiParams, x: FloatArray, extra: int
) -> FloatArray:
    out: FloatArray = basis_matrix(n, x) @ durrmeyer_coefficients(f, n, p, extra)
    return out


def durrmeyer_eval(
    f: Evaluable, n: int, p: JacobiParams, x: FloatArray, extra: int = DEFAULT_EXTRA
) -> FloatArray:
    if n < 1:
        raise ParameterError(f"M_n needs n >= 1, got {n}")
    xs = np.asarray(x, dtype=np.float64)
    return _evaluate(f, n, p, np.atleast_1d(xs), extra).reshape(xs.shape)


def abel_prefactor(n: int, r: int, p: JacobiParams) -> float:
    """n^(falling r) / (n+alpha+beta+2)^(rising r)."""
    return math.exp(log_falling(float(n), r) - log_rising(n + p.alpha + p.beta + 2.0, r))


def durrmeyer_scale(n: int, r: int, p: JacobiParams) -> float:
    """Gamma(n+a+b+r+2) Gamma(n-r+1) / (Gamma(n+a+b+2) Gamma(n+1)), the inverse Abel prefactor."""
    return 1.0 / abel_prefactor(n, r, p)


def _check_order(n: int, r: int) -> None:
    if r < 0 or r > n:
        raise ParameterError(f"derivative order must satisfy 0 <= r <= n, got r={r}, n={n}")


def durrmeyer_deriv(
    f: SmoothFn, n: int, r: int, p: JacobiParams, x: FloatArray, extra: int = DEFAULT_EXTRA
) -> FloatArray:
    """(M_n f)^(r) by the Abel identity: prefactor times M_{n-r}^(alpha+r, beta+r) f^(r)."""
    _check_order(n, r)
    xs = np.asarray(x, dtype=np.float64)
    if r == 0:
        return durrmeyer_eval(f, n, p, xs, extra)
    values = abel_prefactor(n, r, p) * _evaluate(
        f.derivative(r), n - r, p.shifted(r), np.atleast_1d(xs), extra
    )
    return values.reshape(xs.shape)


def durrmeyer_deriv_direct(
    f: SmoothFn, n: int, r: int, p: JacobiParams, x: FloatArray, extra: int = DEFAULT_EXTRA
) -> FloatArray:
    """(M_n f)^(r) as one Gamma prefactor times sum_k p_{n-r,k}(x) int p_{n+a+b+r, k+a+r} f^(r)."""
    _check_order(n, r)
    xs = np.asarray(x, dtype=np.float64)
    a, b = p.alpha, p.beta
    log_scale = (
        sc.gammaln(n + a + b + 2.0)
        + sc.gammaln(n + 1.0)
        - sc.gammaln(n + a + b + r + 1.0)
        - sc.gammaln(n - r + 1.0)
    )
    k = np.arange(n - r + 1, dtype=np.float64)
    integrals = gen_basis_integrals(
        f.derivative(r), n + a + b + r, k + a + r, node_count(n, p, extra)
    )
    values = math.exp(log_scale) * (basis_matrix(n - r, np.atleast_1d(xs)) @ integrals)
    return values.reshape(xs.shape)


def durrmeyer_moment(
    n: int, r: int, p: JacobiParams, x: float, form: MomentForm = "corrected"
) -> float:
    """M_n(e_r; x) in closed form.

    corrected: sum_k C(r,k) n^(falling k) (alpha+k+1)^(rising r-k) x^k / (n+a+b+2)^(rising r)
    printed:   the same with (alpha+r)^(rising r-k), which disagrees with quadrature for r >= 2
    """
    if r < 0:
        raise ParameterError(f"moment order must be >= 0, got {r}")
    total = 0.0
    for k in range(r + 1):
        base = p.alpha + k + 1.0 if form == "corrected" else p.alpha + r
        total += math.comb(r, k) * falling(float(n), k) * rising(base, r - k) * x**k
    return total / rising(n + p.alpha + p.beta + 2.0, r)


def moment_adjudication(
    n: int, r: int, p: JacobiParams, x: float, extra: int = DEFAULT_EXTRA
) -> MomentAdjudication:
    """Compare both closed forms of M_n(e_r; x) against weighted quadrature."""
    quad = float(durrmeyer_eval(lambda t: t**r, n, p, np.array([x]), extra)[0])
    report = MomentAdjudication(
        n=n,
        r=r,
        params=p,
        x=x,
        corrected=durrmeyer_moment(n, r, p, x, "corrected"),
        printed=durrmeyer_moment(n, r, p, x, "printed"),
        quadrature=quad,
        corrected_constant=durrmeyer_moment(n, r, p, 0.0, "corrected"),
        printed_constant=durrmeyer_moment(n, r, p, 0.0, "printed"),
    )
    logger.info(
        "M_%d(e_%d; %g): quadrature=%.17g corrected=%.17g printed=%.17g constant ratio=%g",
        n,
        r,
        x,
        report.quadrature,
        report.corrected,
        report.printed,
        report.constant_ratio,
    )
    if report.printed_error > 1e-9 * max(1.0, abs(report.quadrature)):
        logger.warning(
            "printed moment form deviates from quadrature by %.3e at r=%d",
            report.printed_error,
            r,
        )
    return report


# --- Functionals A = B - C behind the scaled derivative difference ---


def _check_functional(n: int, r: int, k: int | None = None) -> None:
    _check_order(n, r)
    if k is not None and not 0 <= k <= n - r:
        raise ParameterError(f"functional index must satisfy 0 <= k <= n - r, got k={k}")


def functional_b_all(
    phi: Evaluable, n: int, r: int, p: JacobiParams, extra: int = DEFAULT_EXTRA
) -> FloatArray:
    """B_{n,k}(phi) for k = 0..n-r."""
    _check_functional(n, r)
    a, b = p.alpha, p.beta
    k = np.arange(n - r + 1, dtype=np.float64)
    ints = gen_basis_integrals(phi, n + a + b + r, k + a + r, node_count(n, p, extra))
    out: FloatArray = (n + a + b + r + 1.0) * ints
    return out


def functional_c_all(
    phi: Evaluable, n: int, r: int, p: JacobiParams, extra: int = DEFAULT_EXTRA
) -> FloatArray:
    """C_{n,k}(phi) for k = 0..n-r."""
    _check_functional(n, r)
    a, b = p.alpha, p.beta
    k = np.arange(n - r + 1, dtype=np.float64)
    ints = gen_basis_integrals(phi, n - r + a + b, k + a, node_count(n, p, extra))
    out: FloatArray = (n + a + b - r + 1.0) * ints
    return out


def functional_b(
    phi: Evaluable, n: int, r: int, k: int, p: JacobiParams, extra: int = DEFAULT_EXTRA
) -> float:
    _check_functional(n, r, k)
    return float(functional_b_all(phi, n, r, p, extra)[k])


def functional_c(
    phi: Evaluable, n: int, r: int, k: int, p: JacobiParams, extra: int = DEFAULT_EXTRA
) -> float:
    _check_functional(n, r, k)
    return float(functional_c_all(phi, n, r, p, extra)[k])


def functional_a(
    phi: Evaluable, n: int, r: int, k: int, p: JacobiParams, extra: int = DEFAULT_EXTRA
) -> float:
    return functional_b(phi, n, r, k, p, extra) - functional_c(phi, n, r, k, p, extra)


def functional_moments(n: int, r: int, k: int, p: JacobiParams) -> FunctionalMoments:
    """Closed-form e_0, e_1, e_2 images of B_{n,k} and C_{n,k}."""
    _check_functional(n, r, k)
    a, b = p.alpha, p.beta
    bu = k + a + r + 1.0
    bd = n + r + a + b + 2.0
    cu = k + a + 1.0
    cd = n - r + a + b + 2.0
    return FunctionalMoments(
        b_e0=1.0,
        b_e1=bu / bd,
        b_e2=bu * (bu + 1.0) / (bd * (bd + 1.0)),
        c_e0=1.0,
        c_e1=cu / cd,
        c_e2=cu * (cu + 1.0) / (cd * (cd + 1.0)),
    )


def functional_moments_numeric(
    n: int, r: int, k: int, p: JacobiParams, extra: int = DEFAULT_EXTRA
) -> FunctionalMoments:
    """Quadrature versions of the six moments in :func:`functional_moments`."""
    _check_functional(n, r, k)
    values = {}
    for d in range(3):

        def e(t: FloatArray, d: int = d) -> FloatArray:
            return np.asarray(t, dtype=np.float64) ** d

        values[f"b_e{d}"] = functional_b(e, n, r, k, p, extra)
        values[f"c_e{d}"] = functional_c(e, n, r, k, p, extra)
    return FunctionalMoments(**values)


def functional_a_bound(
    second_norm: float, modulus_at: float, n: int, r: int, p: JacobiParams
) -> float:
    """(1/4) ||phi''|| (n+a+b+3)/((n+a+b+3)^2 - r^2) + omega(phi, delta), with omega given."""
    s = n + p.alpha + p.beta + 3.0
    return 0.25 * second_norm * s / (s * s - r * r) + modulus_at


def functional_a_delta(n: int, r: int, p: JacobiParams) -> float:
    """r(n-r+|beta-alpha|) / ((n+2+alpha+beta)^2 - r^2)."""
    s = n + 2.0 + p.alpha + p.beta
    return r * (n - r + abs(p.beta - p.alpha)) / (s * s - r * r)


def durrmeyer_scaled_difference_via_functionals(
    f: SmoothFn, n: int, r: int, p: JacobiParams, x: FloatArray, extra: int = DEFAULT_EXTRA
) -> FloatArray:
    """sum_k p_{n-r,k}(x) A_{n,k}(f^(r)), the signed scaled Durrmeyer difference."""
    _check_order(n, r)
    fr = f.derivative(r)
    a_values = functional_b_all(fr, n, r, p, extra) - functional_c_all(fr, n, r, p, extra)
    xs = np.asarray(x, dtype=np.float64)
    out: FloatArray = (basis_matrix(n - r, np.atleast_1d(xs)) @ a_values).reshape(xs.shape)
    return out
