import cmath
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class Tolerances(BaseModel):
    """Numerical tolerances threaded through every solver."""

    model_config = ConfigDict(frozen=True)

    root_eps: float = Field(default=1e-12, gt=0, description="Newton-polish residual target")
    unimodular_eps: float = Field(default=1e-10, gt=0, description="Band ||u|-1| for unit-circle membership")
    cluster_eps: float = Field(default=1e-6, gt=0, description="Root grouping radius")
    degeneracy_eps: float = Field(default=1e-14, gt=0, description="Relative leading-coefficient cutoff")
    multiplicity_eps: float = Field(default=1e-4, gt=0, description="Grouping radius for >=3-fold certification")
    certify_eps: float = Field(default=1e-6, gt=0, description="Relative residual bound on P and its derivatives")
    residual_eps: float = Field(default=1e-9, gt=0, description="Relative residual band for the reflection identity")

    @model_validator(mode="after")
    def _check_ordering(self) -> "Tolerances":
        if self.cluster_eps <= self.root_eps:
            raise ValueError("cluster_eps must exceed root_eps")
        if self.multiplicity_eps < self.cluster_eps:
            raise ValueError("multiplicity_eps must be at least cluster_eps")
        return self

    @classmethod
    def from_settings(cls, source=None, **overrides) -> "Tolerances":
        """Build tolerances from environment settings, with explicit overrides winning"""
        if source is None:
            from app.core.config import settings as source
        values = {
            "root_eps": source.root_eps,
            "unimodular_eps": source.unimodular_eps,
            "cluster_eps": source.cluster_eps,
            "degeneracy_eps": source.degeneracy_eps,
            "multiplicity_eps": source.multiplicity_eps,
            "certify_eps": source.certify_eps,
            "residual_eps": source.residual_eps,
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


class Root(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: complex
    multiplicity: int = Field(..., ge=1)
    unimodular: bool


class RootSet(BaseModel):
    roots: List[Root]

    @property
    def degree(self) -> int:
        return sum(r.multiplicity for r in self.roots)

    @property
    def unimodular_roots(self) -> List[Root]:
        return [r for r in self.roots if r.unimodular]

    @property
    def off_circle_roots(self) -> List[Root]:
        return [r for r in self.roots if not r.unimodular]

    @property
    def count_unimodular(self) -> int:
        return sum(r.multiplicity for r in self.roots if r.unimodular)

    def values(self) -> List[complex]:
        """Root values repeated by multiplicity"""
        out: List[complex] = []
        for r in self.roots:
            out.extend([r.value] * r.multiplicity)
        return out


class ReflectionCheck(str, Enum):
    EQUAL = "Equal"
    ANTIPODAL = "Antipodal"
    NEITHER = "Neither"


class ProblemKind(str, Enum):
    INTERIOR = "interior"
    EXTERIOR = "exterior"
    EXTERIOR_BLOCKED = "exterior_blocked"


class FocalSum(BaseModel):
    u: complex
    path_length: float


class ReflectionSolution(BaseModel):
    kind: ProblemKind
    z1: complex
    z2: complex
    u: complex = Field(..., description="Canonical reflection point")
    path_length: float = Field(..., description="|z1-u| + |z2-u|")
    ellipse_radius: float = Field(..., description="|2 - conj(u) z1 - u conj(z2)|")
    all_minimizers: List[complex]
    maximizer: complex
    maximal_path_length: float
    metric_value: Optional[float] = Field(default=None, description="|z1-z2| / path_length for interior pairs")
    focal_sums: List[FocalSum] = []
    roots: RootSet
    count_mismatch: bool = Field(default=False, description="Exterior pair without four distinct unimodular roots")


class ClosedForm(BaseModel):
    case: int = Field(..., ge=1, le=5)
    roots: List[complex]
    s_value: Optional[float] = None
    extra_unimodular: Optional[bool] = Field(default=None, description="Whether the non-trivial pair lies on the circle")


class SegmentTest(BaseModel):
    blocked: bool
    line_distance: float
    closest_point: complex


class MetricQuery(BaseModel):
    z1: complex
    z2: complex
    result: float = Field(..., ge=0.0, le=1.0)
    witness: complex
    method: str = Field(..., description="closed form case or quartic")
    oracle: Optional[float] = None


class LevelSetPoint(BaseModel):
    theta: float
    w: complex
    s_residual: float
    b_residual: float


class LevelSet(BaseModel):
    c: float
    t: float
    n_angles: int
    points: List[LevelSetPoint]
    skipped: int = 0
    monotonicity_violations: int = 0


class ConicKind(str, Enum):
    LINE_PAIR = "LinePair"
    EQUILATERAL_HYPERBOLA = "EquilateralHyperbola"


class Line(BaseModel):
    point: complex
    direction: complex


class QuadraticForm(BaseModel):
    """A x^2 + B xy + C y^2 + D x + E y + F"""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float = 0.0

    def evaluate(self, w: complex) -> float:
        x, y = w.real, w.imag
        return self.a * x * x + self.b * x * y + self.c * y * y + self.d * x + self.e * y + self.f

    def scale(self, w: complex) -> float:
        x, y = abs(w.real), abs(w.imag)
        return (abs(self.a) * x * x + abs(self.b) * x * y + abs(self.c) * y * y
                + abs(self.d) * x + abs(self.e) * y + abs(self.f))


class Normalization(BaseModel):
    rotation: float = Field(..., description="Angle phi of the rotation u' = exp(-i phi) u")
    conjugated: bool
    alpha: float = Field(..., ge=0.0, description="Half opening angle in [0, pi/2]")

    def forward(self, w: complex) -> complex:
        v = w * cmath.exp(-1j * self.rotation)
        return v.conjugate() if self.conjugated else v

    def inverse(self, w: complex) -> complex:
        v = w.conjugate() if self.conjugated else w
        return v * cmath.exp(1j * self.rotation)


class ConicModel(BaseModel):
    z1: complex
    z2: complex
    form: QuadraticForm
    center: complex
    kind: ConicKind
    lines_or_asymptotes: List[Line]
    line_distances: Optional[Tuple[float, float]] = None
    vertex_distance: Optional[float] = None
    hyperbola_constant: float = Field(..., description="K of (X)(Y) = K in the normalized frame")
    vertices: List[complex] = []
    normalization: Normalization
    ill_conditioned: bool = False


class ConicReport(BaseModel):
    conic: ConicModel
    intersections: List[complex]
    quartic_unimodular: List[complex]
    hausdorff_distance: float
    predicted_count: Optional[int] = None
    note: Optional[str] = None


class RootPattern(str, Enum):
    FOUR_SIMPLE = "FourSimple"
    TWO_SIMPLE_TWO_OFF = "TwoSimpleTwoOff"
    DOUBLE_PLUS_TWO_SIMPLE = "DoublePlusTwoSimple"
    TRIPLE_PLUS_SIMPLE = "TriplePlusSimple"
    CUBIC = "Cubic"
    DEGENERATE = "Degenerate"


class Prediction(str, Enum):
    FOUR = "Four"
    TWO = "Two"
    INDETERMINATE = "Indeterminate"


class RootProfile(BaseModel):
    z1: complex
    z2: complex
    count_unimodular: int
    pattern: RootPattern
    ratio_lo: Optional[float] = Field(default=None, description="|z1+z2| / |z1 z2|; absent when z1 z2 = 0")
    prediction: Prediction
    consistent: bool
    second_derivative_in_disk: bool
    roots: RootSet


class SharpnessRow(BaseModel):
    t: float
    ratio: float
    count: int


class OutputFormat(str, Enum):
    TEXT = "text"
    JSON = "json"
    CSV = "csv"
    SVG = "svg"


class RunConfig(BaseModel):
    tolerances: Tolerances = Field(default_factory=Tolerances)
    output_format: OutputFormat = OutputFormat.TEXT
    seed: int = Field(default=42, ge=0)
    output_path: Optional[str] = None
    n: Optional[int] = Field(default=None, ge=1)
    check: bool = False
    quick: bool = False


class SuiteResult(BaseModel):
    name: str
    checked: int
    failures: int
    details: List[str] = []
    seconds: float

    @property
    def passed(self) -> bool:
        return self.failures == 0


class SelftestReport(BaseModel):
    seed: int
    quick: bool
    suites: List[SuiteResult]

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)
