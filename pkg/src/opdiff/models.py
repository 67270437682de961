from __future__ import annotations

from enum import StrEnum
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, model_validator

SCHEMA_VERSION = "1.0"


class Family(StrEnum):
    BERNSTEIN = "bernstein"
    KANTOROVICH = "kantorovich"
    Q_OP = "q_op"
    DURRMEYER = "durrmeyer"
    GENUINE = "genuine"


class Theorem(StrEnum):
    THM1 = "thm1"
    THM2 = "thm2"
    THM3 = "thm3"
    THM4 = "thm4"
    THM5 = "thm5"
    COR1 = "cor1"
    COR2 = "cor2"
    THM6 = "thm6"


class Verdict(StrEnum):
    HOLDS = "holds"
    HOLDS_LOOSE = "holds_loose"
    VIOLATED = "violated"


class JacobiParams(BaseModel):
    """Exponents of the weight t^alpha (1-t)^beta."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(0.0, gt=-1.0)
    beta: float = Field(0.0, gt=-1.0)

    def shifted(self, r: int) -> JacobiParams:
        return JacobiParams(alpha=self.alpha + r, beta=self.beta + r)

    @property
    def is_classical(self) -> bool:
        return self.alpha == 0.0 and self.beta == 0.0


class FactorialKind(BaseModel):
    model_config = ConfigDict(frozen=True)

    tag: Literal["rising", "falling"]
    base: float
    length: int = Field(ge=0)


class BasisIndex(BaseModel):
    """Degree ``a`` and index ``b`` of a (possibly generalized) Bernstein basis function."""

    model_config = ConfigDict(frozen=True)

    degree: float
    index: float

    @model_validator(mode="after")
    def _check_gamma_arguments(self) -> BasisIndex:
        if not self.index + 1.0 > 0.0:
            raise ValueError(f"index + 1 must be positive, got index={self.index}")
        if not self.degree - self.index + 1.0 > 0.0:
            raise ValueError(
                f"degree - index + 1 must be positive, got {self.degree} - {self.index} + 1"
            )
        return self


class WeightKind(BaseModel):
    """Weight function of a quadrature rule on [0, 1]."""

    model_config = ConfigDict(frozen=True)

    name: Literal["legendre", "jacobi"] = "legendre"
    alpha: float = Field(0.0, gt=-1.0)
    beta: float = Field(0.0, gt=-1.0)

    @model_validator(mode="after")
    def _legendre_is_unweighted(self) -> WeightKind:
        if self.name == "legendre" and (self.alpha != 0.0 or self.beta != 0.0):
            raise ValueError("legendre weight takes no exponents")
        return self

    @classmethod
    def legendre(cls) -> WeightKind:
        return cls(name="legendre")

    @classmethod
    def jacobi(cls, alpha: float, beta: float) -> WeightKind:
        return cls(name="jacobi", alpha=alpha, beta=beta)


class OperatorSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: Family
    n: int = Field(ge=1)
    r: int = Field(0, ge=0)
    k: int = Field(0, ge=0)
    params: JacobiParams = JacobiParams()

    @model_validator(mode="after")
    def _check_ranges(self) -> OperatorSpec:
        if self.r > self.n:
            raise ValueError(f"r={self.r} exceeds n={self.n}")
        if self.family is Family.GENUINE:
            if self.n < 2:
                raise ValueError("genuine operator needs n >= 2")
            if self.r > self.n - 2:
                raise ValueError(f"genuine operator needs r <= n - 2, got r={self.r}, n={self.n}")
        if self.family is Family.Q_OP:
            if self.k < 1:
                raise ValueError("q_op needs k >= 1")
            if self.k + self.r > self.n:
                raise ValueError(f"q_op needs k + r <= n, got k={self.k}, r={self.r}, n={self.n}")
        return self

    def lowered(self) -> OperatorSpec:
        """The comparison operator L_{n-r} applied to f^(r)."""
        return self.model_copy(update={"n": self.n - self.r, "r": 0})

    def label(self) -> str:
        extra = ""
        if self.family is Family.Q_OP:
            extra = f", k={self.k}"
        elif self.family is Family.DURRMEYER:
            extra = f", alpha={self.params.alpha:g}, beta={self.params.beta:g}"
        return f"{self.family.value}(n={self.n}, r={self.r}{extra})"


class ModulusEstimate(BaseModel):
    model_config = ConfigDict(frozen=True)

    delta: float = Field(ge=0.0)
    grid_points: int = Field(ge=2)
    value_grid: float = Field(ge=0.0)
    value_lipschitz: float | None = None

    @model_validator(mode="after")
    def _grid_below_lipschitz(self) -> ModulusEstimate:
        if self.value_lipschitz is not None and self.value_grid > self.value_lipschitz + 1e-12:
            raise ValueError("grid modulus exceeds its Lipschitz upper estimate")
        return self

    @property
    def upper(self) -> float:
        return self.value_grid if self.value_lipschitz is None else self.value_lipschitz


class NamedTerm(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    coefficient: float
    norm: float
    value: float


class RhsTerms(BaseModel):
    model_config = ConfigDict(frozen=True)

    supnorm_term: float
    modulus_term_grid: float
    modulus_term_lipschitz: float
    extra_terms: tuple[NamedTerm, ...] = ()
    modulus_delta: float = 0.0

    @property
    def extra_total(self) -> float:
        return sum(term.value for term in self.extra_terms)

    @property
    def total_grid(self) -> float:
        return self.supnorm_term + self.modulus_term_grid + self.extra_total

    @property
    def total_lipschitz(self) -> float:
        return self.supnorm_term + self.modulus_term_lipschitz + self.extra_total


class BoundReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    theorem: Theorem
    spec: OperatorSpec
    lhs_sup: float
    rhs: RhsTerms
    rhs_total_grid: float
    rhs_total_lipschitz: float
    verdict: Verdict
    grid_points: int
    norm_grid_points: int
    refinement_stable: bool | None = None

    @model_validator(mode="after")
    def _grid_total_below_lipschitz(self) -> BoundReport:
        if self.rhs_total_grid > self.rhs_total_lipschitz * (1 + 1e-12) + 1e-15:
            raise ValueError("grid total exceeds Lipschitz total")
        return self

    def to_document(self) -> dict[str, Any]:
        """The frozen JSON layout; new keys may be added, existing ones never renamed."""
        doc: dict[str, Any] = {
            "theorem": self.theorem.value,
            "family": self.spec.family.value,
            "n": self.spec.n,
            "r": self.spec.r,
            "alpha": self.spec.params.alpha,
            "beta": self.spec.params.beta,
            "k": self.spec.k,
            "lhs_sup": self.lhs_sup,
            "rhs": {
                "supnorm_term": self.rhs.supnorm_term,
                "modulus_term_grid": self.rhs.modulus_term_grid,
                "modulus_term_lipschitz": self.rhs.modulus_term_lipschitz,
                "extra_terms": [
                    {"name": t.name, "value": t.value} for t in self.rhs.extra_terms
                ],
            },
            "verdict": self.verdict.value,
            "grid_points": self.grid_points,
            "version": SCHEMA_VERSION,
            "rhs_total_grid": self.rhs_total_grid,
            "rhs_total_lipschitz": self.rhs_total_lipschitz,
            "modulus_delta": self.rhs.modulus_delta,
            "norm_grid_points": self.norm_grid_points,
        }
        if self.refinement_stable is not None:
            doc["refinement_stable"] = self.refinement_stable
        return doc


class FunctionalMoments(BaseModel):
    """e_0, e_1, e_2 images of the normalized functionals B_{n,k} and C_{n,k}."""

    model_config = ConfigDict(frozen=True)

    b_e0: float
    b_e1: float
    b_e2: float
    c_e0: float
    c_e1: float
    c_e2: float

    @property
    def b_variance(self) -> float:
        return self.b_e2 - self.b_e1**2

    @property
    def c_variance(self) -> float:
        return self.c_e2 - self.c_e1**2


class MomentAdjudication(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    r: int
    params: JacobiParams
    x: float
    corrected: float
    printed: float
    quadrature: float
    corrected_constant: float
    printed_constant: float

    @property
    def constant_ratio(self) -> float:
        return self.printed_constant / self.corrected_constant

    @property
    def corrected_error(self) -> float:
        return abs(self.corrected - self.quadrature)

    @property
    def printed_error(self) -> float:
        return abs(self.printed - self.quadrature)


class FigureSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    example_id: int = Field(ge=1, le=4)
    source: str
    family: Family
    theorem: Theorem
    r: int = Field(ge=0)
    n_list: tuple[int, ...]
    left_n: int
    params: JacobiParams = JacobiParams()

    @model_validator(mode="after")
    def _left_n_listed(self) -> FigureSpec:
        if self.left_n not in self.n_list:
            raise ValueError(f"left_n={self.left_n} not in n_list {self.n_list}")
        return self

    def spec(self, n: int) -> OperatorSpec:
        return OperatorSpec(family=self.family, n=n, r=self.r, params=self.params)


class SupError(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    sup_error: float


class FigureSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    example_id: int
    source: str
    family: Family
    theorem: Theorem
    r: int
    n_list: tuple[int, ...]
    left_n: int
    sup_errors: tuple[SupError, ...]
    strictly_decreasing: bool
    max_left_gap: float
    rhs_total_grid: float
    rhs_total_lipschitz: float
    verdict: Verdict
    grid_points: int
    version: str = SCHEMA_VERSION
