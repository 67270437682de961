"""Gauss rules on [0, 1], panel integration and numeric antiderivatives.

Rules come from the Golub-Welsch eigen-solve of the shifted Jacobi recurrence matrix
and are cached process-wide per (weight kind, node count).
"""

from __future__ import annotations

import logging
import math
import threading
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy import linalg
from scipy import special as sc

from opdiff.exceptions import ConvergenceError, DomainError, ParameterError
from opdiff.models import WeightKind
from opdiff.special import log_beta, log_gen_binom

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
Evaluable = Callable[[FloatArray], FloatArray]

PANEL_POINTS = 16
MIN_PANELS = 64
_ENDPOINT_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class QuadRule:
    nodes: FloatArray
    weights: FloatArray
    weight_kind: WeightKind

    @property
    def count(self) -> int:
        return int(self.nodes.size)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())


_RULES: dict[tuple[WeightKind, int], QuadRule] = {}
_RULES_LOCK = threading.Lock()


def _recurrence(a: float, b: float, m: int) -> tuple[FloatArray, FloatArray]:
    """Monic Jacobi recurrence on [-1, 1] for the weight (1-s)^a (1+s)^b."""
    ab = a + b
    diag = np.empty(m)
    diag[0] = (b - a) / (ab + 2.0)
    if m > 1:
        i = np.arange(1, m, dtype=np.float64)
        diag[1:] = (b * b - a * a) / ((2 * i + ab) * (2 * i + ab + 2.0))
    off_sq = np.empty(max(m - 1, 0))
    if m > 1:
        off_sq[0] = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) ** 2 * (3.0 + ab))
    if m > 2:
        j = np.arange(2, m, dtype=np.float64)
        s = 2 * j + ab
        off_sq[1:] = 4.0 * j * (j + a) * (j + b) * (j + ab) / (s * s * (s * s - 1.0))
    return diag, np.sqrt(off_sq)


def _golub_welsch(kind: WeightKind, m: int) -> QuadRule:
    # t^alpha (1-t)^beta on [0,1] is (1+s)^alpha (1-s)^beta on [-1,1].
    diag, off = _recurrence(kind.beta, kind.alpha, m)
    diag = 0.5 * (1.0 + diag)
    off = 0.5 * off
    mu0 = math.exp(log_beta(kind.alpha + 1.0, kind.beta + 1.0))
    if m == 1:
        return QuadRule(nodes=diag.copy(), weights=np.array([mu0]), weight_kind=kind)
    try:
        nodes, vectors = linalg.eigh_tridiagonal(diag, off)
    except linalg.LinAlgError as e:
        raise ConvergenceError(f"eigen-solve failed for {kind.name} rule, m={m}: {e}") from e
    weights = mu0 * vectors[0, :] ** 2
    return QuadRule(nodes=np.asarray(nodes), weights=weights, weight_kind=kind)


def gauss_rule(kind: WeightKind, m: int) -> QuadRule:
    """m-point Gauss rule for ``kind`` on [0, 1]."""
    if m < 1:
        raise ParameterError(f"a Gauss rule needs m >= 1, got {m}")
    key = (kind, m)
    cached = _RULES.get(key)
    if cached is not None:
        return cached
    rule = _golub_welsch(kind, m)
    with _RULES_LOCK:
        cached = _RULES.setdefault(key, rule)
    if cached is rule:
        logger.debug(
            "built %s rule (alpha=%g, beta=%g) with %d nodes", kind.name, kind.alpha, kind.beta, m
        )
    return cached


def legendre(m: int) -> QuadRule:
    return gauss_rule(WeightKind.legendre(), m)


def jacobi(alpha: float, beta: float, m: int) -> QuadRule:
    return gauss_rule(WeightKind.jacobi(alpha, beta), m)


def integrate(f: Evaluable, rule: QuadRule) -> float:
    """Sum of weights times f at the nodes, approximating the weighted integral over [0, 1]."""
    return float(np.dot(rule.weights, f(rule.nodes)))


def _check_interval(a: float, b: float) -> None:
    if a > b:
        raise ParameterError(f"empty interval [{a}, {b}]")
    if a < -_ENDPOINT_SLACK or b > 1.0 + _ENDPOINT_SLACK:
        raise DomainError(f"interval [{a}, {b}] leaves [0, 1]")


def panel_integral(f: Evaluable, a: float, b: float, m: int = PANEL_POINTS) -> float:
    _check_interval(a, b)
    rule = legendre(m)
    return (b - a) * float(np.dot(rule.weights, f(a + (b - a) * rule.nodes)))


def panel_integrals(f: Evaluable, edges: FloatArray, m: int = PANEL_POINTS) -> FloatArray:
    """Integrals of f over consecutive panels [edges[i], edges[i+1]], one evaluation pass."""
    edges = np.asarray(edges, dtype=np.float64)
    _check_interval(float(edges[0]), float(edges[-1]))
    widths = np.diff(edges)
    if np.any(widths < 0.0):
        raise ParameterError("panel edges must be non-decreasing")
    rule = legendre(m)
    points = edges[:-1, None] + widths[:, None] * rule.nodes[None, :]
    values = np.asarray(f(points.ravel()), dtype=np.float64).reshape(points.shape)
    out: FloatArray = widths * (values @ rule.weights)
    return out


def _fraction(e: float) -> float:
    """Split ``e`` into ceil(e) plus a fractional part in (-1, 0]."""
    nearest = round(e)
    if abs(e - nearest) < 1e-12:
        return 0.0
    return e - math.ceil(e)


def gen_basis_integrals(
    g: Evaluable, a: float, b: npt.ArrayLike, m: int
) -> FloatArray:
    """Integrals of p_{a,b_i}(t) g(t) over [0, 1] for indices b_i sharing a fractional part.

    The fractional parts of the two exponents b_i and a - b_i go into a Jacobi weight so
    that the remaining factor is a polynomial in t.
    """
    bs = np.atleast_1d(np.asarray(b, dtype=np.float64))
    log_coef = log_gen_binom(a, bs)
    s1 = _fraction(float(bs[0]))
    s2 = _fraction(float(a - bs[0]))
    j1 = np.rint(bs - s1)
    j2 = np.rint(a - bs - s2)
    if np.any(np.abs(bs - s1 - j1) > 1e-9) or np.any(np.abs(a - bs - s2 - j2) > 1e-9):
        raise ParameterError("generalized indices must share their fractional parts")
    rule = jacobi(s1, s2, m)
    t = rule.nodes
    log_poly = (
        log_coef[:, None]
        + sc.xlogy(j1[:, None], t[None, :])
        + sc.xlog1py(j2[:, None], -t[None, :])
    )
    out: FloatArray = np.exp(log_poly) @ (rule.weights * g(t))
    return out


def gen_basis_integral(g: Evaluable, a: float, b: float, m: int) -> float:
    return float(gen_basis_integrals(g, a, b, m)[0])


class Antiderivative:
    """Order-k antiderivative F of f with F^(j)(0) = 0 for j < k.

    Breakpoint values come from a Taylor recurrence across uniform panels: with
    F_j the j-th antiderivative,

        F_j(e + h) = sum_{l<j} F_{j-l}(e) h^l / l! + int_e^{e+h} (e+h-t)^{j-1}/(j-1)! f(t) dt

    and the remainder integral uses a 16-point Gauss-Legendre rule per panel. Point
    values expand from the left breakpoint with a partial-panel remainder.
    """

    def __init__(self, source: Evaluable, order: int, panels: int = 128) -> None:
        if order < 1:
            raise ParameterError(f"antiderivative order must be >= 1, got {order}")
        if panels < MIN_PANELS:
            raise ParameterError(f"antiderivative needs >= {MIN_PANELS} panels, got {panels}")
        self.source = source
        self.order = order
        self.panels = panels
        self.breakpoints = np.linspace(0.0, 1.0, panels + 1)
        self._rule = legendre(PANEL_POINTS)
        self._table = self._tabulate()
        logger.debug("tabulated order-%d antiderivative on %d panels", order, panels)

    def _kernel(self, span: FloatArray, j: int) -> FloatArray:
        """(span * (1 - tau))^(j-1) / (j-1)! at the local nodes tau, times the rule weights."""
        tau = self._rule.nodes
        lengths = span[:, None] * (1.0 - tau[None, :])
        out: FloatArray = lengths ** (j - 1) / math.factorial(j - 1) * self._rule.weights
        return out

    def _remainders(self, starts: FloatArray, span: FloatArray) -> FloatArray:
        """Remainder integrals for j = 1..order, shape (order, len(starts))."""
        points = starts[:, None] + span[:, None] * self._rule.nodes[None, :]
        fv = np.asarray(self.source(points.ravel()), dtype=np.float64).reshape(points.shape)
        return np.stack(
            [span * np.sum(self._kernel(span, j) * fv, axis=1) for j in range(1, self.order + 1)]
        )

    def _tabulate(self) -> FloatArray:
        k = self.order
        h = 1.0 / self.panels
        starts = self.breakpoints[:-1]
        rem = self._remainders(starts, np.full(self.panels, h))
        powers = np.array([h**p / math.factorial(p) for p in range(k)])
        # table[j, i] = F_j(breakpoints[i]) for j = 1..k; row 0 unused.
        table = np.zeros((k + 1, self.panels + 1))
        for i in range(self.panels):
            for j in range(1, k + 1):
                taylor = sum(table[j - p, i] * powers[p] for p in range(j))
                table[j, i + 1] = taylor + rem[j - 1, i]
        return table

    def value(self, x: FloatArray, order: int | None = None) -> FloatArray:
        """F_order at x, where F_order is the order-th antiderivative (default: self.order)."""
        j = self.order if order is None else order
        if not 1 <= j <= self.order:
            raise ParameterError(f"antiderivative order {j} not tabulated (max {self.order})")
        xs = np.asarray(x, dtype=np.float64).ravel()
        if np.any(xs < -_ENDPOINT_SLACK) or np.any(xs > 1.0 + _ENDPOINT_SLACK):
            raise DomainError("antiderivative evaluated outside [0, 1]")
        xs = np.clip(xs, 0.0, 1.0)
        idx = np.minimum((xs * self.panels).astype(np.int64), self.panels - 1)
        left = self.breakpoints[idx]
        d = xs - left
        out = np.zeros_like(xs)
        for p in range(j):
            out += self._table[j - p, idx] * d**p / math.factorial(p)
        rem = self._remainders(left, d)
        out += rem[j - 1]
        return out.reshape(np.shape(x))

    def __call__(self, x: FloatArray) -> FloatArray:
        return self.value(x)


def antiderivative(f: Evaluable, k: int, panels: int = 128) -> Antiderivative:
    return Antiderivative(f, k, panels)
