"""JSON documents read and written by the command-line interface."""
from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# Regions


class IntervalSpec(_Strict):
    #: ``null`` means unbounded
    lower: Optional[float] = None
    upper: Optional[float] = None
    lower_open: bool = False
    upper_open: bool = False


class _RegionBase(_Strict):
    name: Optional[str] = None
    dim: Optional[int] = Field(None, ge=0)


class FullRegion(_RegionBase):
    type: Literal["full"]


class EmptyRegion(_RegionBase):
    type: Literal["empty"]


class FiniteRegion(_RegionBase):
    type: Literal["finite"]
    points: Optional[List[List[float]]] = None
    indices: Optional[List[int]] = None

    @model_validator(mode="after")
    def _one_of(self) -> "FiniteRegion":
        if (self.points is None) == (self.indices is None):
            raise ValueError("A finite region needs exactly one of 'points' or 'indices'.")
        return self


class BoxRegion(_RegionBase):
    type: Literal["box"]
    intervals: List[IntervalSpec] = Field(..., min_length=1)


class ConstraintRegion(_RegionBase):
    type: Literal["constraint"]
    linear: Optional[List[float]] = None
    function: Optional[Literal["hwe"]] = None
    relation: Literal["<=", "<", "=", ">", ">="]
    rhs: float
    family: Optional[str] = None

    @model_validator(mode="after")
    def _one_of(self) -> "ConstraintRegion":
        if (self.linear is None) == (self.function is None):
            raise ValueError("A constraint needs exactly one of 'linear' or 'function'.")
        return self


class ComplementRegion(_RegionBase):
    type: Literal["complement"]
    child: "RegionSpec"


class UnionRegion(_RegionBase):
    type: Literal["union"]
    members: List["RegionSpec"] = Field(..., min_length=1)


class IntersectionRegion(_RegionBase):
    type: Literal["intersection"]
    members: List["RegionSpec"] = Field(..., min_length=1)


RegionSpec = Annotated[
    Union[
        FullRegion,
        EmptyRegion,
        FiniteRegion,
        BoxRegion,
        ConstraintRegion,
        ComplementRegion,
        UnionRegion,
        IntersectionRegion,
    ],
    Field(discriminator="type"),
]

for _node in (ComplementRegion, UnionRegion, IntersectionRegion):
    _node.model_rebuild()


# Models


class CountParams(_Strict):
    n: int = Field(..., ge=1)


class BinomialFiniteParams(_Strict):
    n: int = Field(..., ge=1)
    thetas: List[float] = Field(..., min_length=1)


class ThreePointParams(_Strict):
    theta_max: Optional[int] = Field(None, ge=1)


class FiniteParams(_Strict):
    labels: List[str] = Field(..., min_length=1)
    #: outcome -> likelihood of each label
    table: Dict[str, List[float]]
    coords: Optional[List[List[float]]] = None


class NoParams(_Strict):
    pass


class BinomialSpec(_Strict):
    name: Literal["binomial"]
    params: CountParams


class BinomialFiniteSpec(_Strict):
    name: Literal["binomial-finite"]
    params: BinomialFiniteParams


class PoissonSpec(_Strict):
    name: Literal["poisson"]
    params: NoParams = NoParams()


class NormalSpec(_Strict):
    name: Literal["normal"]
    params: CountParams


class TrinomialSpec(_Strict):
    name: Literal["trinomial"]
    params: NoParams = NoParams()


class FraserSpec(_Strict):
    name: Literal["fraser"]
    params: ThreePointParams = ThreePointParams()


class SeveriniSpec(_Strict):
    name: Literal["severini"]
    params: ThreePointParams = ThreePointParams()


class FiniteSpec(_Strict):
    name: Literal["finite"]
    params: FiniteParams


ModelSpec = Annotated[
    Union[
        BinomialSpec,
        BinomialFiniteSpec,
        PoissonSpec,
        NormalSpec,
        TrinomialSpec,
        FraserSpec,
        SeveriniSpec,
        FiniteSpec,
    ],
    Field(discriminator="name"),
]

MODEL_NAMES = (
    "binomial",
    "binomial-finite",
    "poisson",
    "normal",
    "trinomial",
    "fraser",
    "severini",
    "finite",
)


class SampleSpec(_Strict):
    #: Observation, count triple or ``(mean, variance)`` pair
    data: Optional[List[Union[int, float, str]]] = None
    #: Raw Normal observations, reduced to their sufficient statistics
    raw: Optional[List[float]] = None

    @model_validator(mode="after")
    def _one_of(self) -> "SampleSpec":
        if (self.data is None) == (self.raw is None):
            raise ValueError("A sample needs exactly one of 'data' or 'raw'.")
        if self.data is not None and not self.data:
            raise ValueError("Sample data must not be empty.")
        return self


# Priors


class FinitePriorSpec(_Strict):
    kind: Literal["finite"]
    #: ``None`` means uniform over the parameter labels
    weights: Optional[List[float]] = None


class UniformPriorSpec(_Strict):
    kind: Literal["uniform"]
    bounds: List[Tuple[float, float]] = Field(..., min_length=1, max_length=2)


class BetaPriorSpec(_Strict):
    kind: Literal["beta"]
    a: float = Field(..., gt=0)
    b: float = Field(..., gt=0)


PriorSpec = Annotated[
    Union[FinitePriorSpec, UniformPriorSpec, BetaPriorSpec], Field(discriminator="kind")
]


# Analysis


class OptimizerSpec(_Strict):
    rel_tol: float = Field(1e-8, gt=0)
    grid: Optional[int] = Field(None, ge=3)
    refine_rounds: int = Field(4, ge=0)
    multistarts: int = Field(16, ge=1)
    seed: int = 0
    threads: Optional[int] = Field(None, ge=1)


class ThresholdSpec(_Strict):
    a_star: float = Field(0.01, gt=0, lt=1)
    b_star: float = Field(0.01, gt=0, lt=1)


class GridOptions(_Strict):
    resolution: int = Field(200, ge=3)
    bounds: Optional[List[Tuple[float, float]]] = None


class AnalysisSpec(_Strict):
    model: ModelSpec
    sample: SampleSpec
    regions: List[RegionSpec] = []
    optimizer: OptimizerSpec = OptimizerSpec()
    prior: Optional[PriorSpec] = None
    format: Literal["json", "csv"] = "json"
    thresholds: ThresholdSpec = ThresholdSpec()
    philosophy: Literal["fisherian", "neyman_pearson"] = "neyman_pearson"
    regime: Optional[Literal["both_nonsharp", "sharp_null", "sharp_alternative"]] = None
    #: Level of the contour; defaults to ν of the first region
    alpha: Optional[float] = Field(None, gt=0, le=1)
    grid: GridOptions = GridOptions()

    model_config = ConfigDict(
        extra="forbid",
        json_schema_extra={
            "example": {
                "model": {"name": "binomial", "params": {"n": 8}},
                "sample": {"data": [4]},
                "regions": [
                    {
                        "type": "box",
                        "name": "theta0",
                        "intervals": [{"lower": 0.4, "upper": 0.6}],
                    }
                ],
            }
        },
    )


# Reports


class SupReport(BaseModel):
    #: ``None`` when the supremum is -inf
    sup_loglik: Optional[float]
    witness: Optional[List[float]]
    method: str
    evaluations: int
    converged: bool
    feasible: bool


class NuReport(BaseModel):
    region: str
    nu: float
    log_nu: Optional[float]
    witness: Optional[List[float]]
    interpretation: str
    sup: SupReport


class EvidenceReport(BaseModel):
    model: str
    region: str
    nu0: float
    nu0c: float
    null: NuReport
    alternative: NuReport
    mle: List[float]
    seed: int


class PhiReport(BaseModel):
    model: str
    region: str
    nu0: float
    nu0c: float
    regime: str
    decision: str
    a_star: float
    b_star: float
    philosophy: str
    annotations: List[str]
    null: NuReport
    alternative: NuReport
    seed: int


class RatioReport(BaseModel):
    model: str
    first: str
    second: str
    value: Optional[float]
    defined: bool
    interpretation: Optional[str]
    numerator: NuReport
    denominator: NuReport
    seed: int


class ContourReport(BaseModel):
    model: str
    alpha: float
    axis_names: List[str]
    points_inside: int
    points_total: int
    degenerate: bool
    mle: List[List[float]]
    polylines: List[List[List[float]]]


class UpperLowerReport(BaseModel):
    upper: float
    lower: float
    uniform_posterior: float


class BayesReport(BaseModel):
    model: str
    region: str
    nu: float
    post_prob: float
    prior_prob: float
    m_x: float
    c_x: float
    log_m_x: Optional[float]
    log_c_x: float
    bound: Optional[float]
    lemma2_holds: Optional[bool]
    corollary1_applicable: bool
    corollary1_holds: Optional[bool]
    impossibility_holds: bool
    walley_moral: Optional[UpperLowerReport] = None


class HweReportModel(BaseModel):
    y1: int
    y2: int
    y3: int
    m: int
    nu1: float
    nu2: float
    nu3: float
    log_nu1: Optional[float]
    mle: List[float]
    tilde_theta: List[float]
    case: str
    polylines: Optional[List[List[List[float]]]] = None
