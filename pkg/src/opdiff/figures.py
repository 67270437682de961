"""Preloaded worked examples and the curve data behind their two figures."""

from __future__ import annotations

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from opdiff.bounds import uniform_grid, verify
from opdiff.config import OpdiffConfig
from opdiff.exceptions import ParameterError
from opdiff.expr import SmoothFn, from_source
from opdiff.models import BoundReport, Family, FigureSpec, JacobiParams, SupError, Theorem
from opdiff.operators import derivative, difference, lower
from opdiff.quadrature import FloatArray

logger = logging.getLogger(__name__)

# Sources are kept exactly as printed so every figure regenerates from text.
EXAMPLES: dict[int, FigureSpec] = {
    1: FigureSpec(
        example_id=1,
        source="1/(32*pi)*(4*pi*x*cos(2*pi*x) - pi*cos(2*pi*x) - 6*sin(2*pi*x))",
        family=Family.BERNSTEIN,
        theorem=Theorem.THM1,
        r=3,
        n_list=(50, 100, 150),
        left_n=50,
    ),
    2: FigureSpec(
        example_id=2,
        source="-sin(2*pi*x)/(4*pi^2) - 32/pi^2*sin(pi*x/4)",
        family=Family.KANTOROVICH,
        theorem=Theorem.THM2,
        r=2,
        n_list=(50, 100, 150),
        left_n=50,
    ),
    3: FigureSpec(
        example_id=3,
        source="x^5/20 - 3*x^4/32 + 13*x^3/192 - 3*x^2/128",
        family=Family.DURRMEYER,
        theorem=Theorem.COR2,
        r=2,
        n_list=(50, 100, 150),
        left_n=50,
        params=JacobiParams(alpha=0.0, beta=0.0),
    ),
    4: FigureSpec(
        example_id=4,
        source="x^5/20 - 17*x^4/144 + 7*x^3/72 - x^2/32",
        family=Family.GENUINE,
        theorem=Theorem.THM6,
        r=2,
        n_list=(30, 40, 50),
        left_n=50,
    ),
}


def example(example_id: int) -> FigureSpec:
    try:
        return EXAMPLES[example_id]
    except KeyError:
        known = ", ".join(str(i) for i in sorted(EXAMPLES))
        raise ParameterError(f"unknown example {example_id}; choose one of {known}") from None


@dataclass(frozen=True)
class FigureData:
    """Left curves at ``spec.left_n`` and the unscaled error curve for every n."""

    spec: FigureSpec
    x: FloatArray
    target: FloatArray
    lowered: FloatArray
    derived: FloatArray
    errors: dict[int, FloatArray]
    report: BoundReport

    @property
    def left_columns(self) -> dict[str, FloatArray]:
        r = self.spec.r
        n = self.spec.left_n
        return {
            f"f^({r})": self.target,
            f"L_{n - r}(f^({r}))": self.lowered,
            f"(L_{n} f)^({r})": self.derived,
        }

    @property
    def right_columns(self) -> dict[str, FloatArray]:
        return {f"E_{n}": self.errors[n] for n in self.spec.n_list}

    @property
    def sup_errors(self) -> tuple[SupError, ...]:
        return tuple(
            SupError(n=n, sup_error=float(np.max(self.errors[n]))) for n in self.spec.n_list
        )

    @property
    def strictly_decreasing(self) -> bool:
        sups = [s.sup_error for s in self.sup_errors]
        return all(a > b for a, b in itertools.pairwise(sups))

    @property
    def max_gap(self) -> float:
        curves = (self.target, self.lowered, self.derived)
        return max(
            float(np.max(np.abs(a - b))) for a, b in itertools.combinations(curves, 2)
        )


def _errors(
    fig: FigureSpec, f: SmoothFn, n: int, x: FloatArray, config: OpdiffConfig
) -> FloatArray:
    logger.debug("example %d: error curve at n=%d", fig.example_id, n)
    return difference(
        fig.spec(n),
        f,
        x,
        quad_extra=config.quad_extra,
        panels=config.antiderivative_panels,
    )


def build_figure(example_id: int, config: OpdiffConfig | None = None) -> FigureData:
    config = config or OpdiffConfig()
    fig = example(example_id)
    f = from_source(fig.source, fig.r + 2)
    x = uniform_grid(config.grid_points)
    left = fig.spec(fig.left_n)
    options = {"quad_extra": config.quad_extra, "panels": config.antiderivative_panels}

    target = f.derivative(fig.r)(x)
    lowered = lower(left, f, x, **options)
    derived = derivative(left, f, x, **options)

    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            curves = list(pool.map(lambda n: _errors(fig, f, n, x, config), fig.n_list))
    else:
        curves = [_errors(fig, f, n, x, config) for n in fig.n_list]

    report = verify(
        fig.theorem,
        left,
        f,
        config.grid_points,
        norm_grid_points=config.norm_grid_points,
        quad_extra=config.quad_extra,
        panels=config.antiderivative_panels,
        atol=config.verdict_atol,
        check_refinement=config.check_refinement,
    )
    return FigureData(
        spec=fig,
        x=x,
        target=target,
        lowered=lowered,
        derived=derived,
        errors=dict(zip(fig.n_list, curves, strict=True)),
        report=report,
    )
