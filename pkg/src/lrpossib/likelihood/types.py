import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from lrpossib import config
from lrpossib.likelihood import perf

# Exceptions


class PossibilityError(Exception):
    pass


class InputError(PossibilityError, ValueError):
    pass


class RegionError(InputError):
    pass


class PreconditionError(InputError):
    pass


class SampleError(InputError):
    def __init__(self, status: "SampleStatus", message: str) -> None:
        super().__init__(message)
        self.status = status


class UnsupportedError(PossibilityError):
    pass


class ConvergenceError(PossibilityError):
    pass


class QuadratureError(ConvergenceError):
    def __init__(self, message: str, estimate: float) -> None:
        super().__init__(f"{message} (achieved error estimate: {estimate:.3g})")
        self.estimate = estimate


class RegimeError(PossibilityError):
    pass


# Enumerations


class SampleStatus(Enum):
    OK = "ok"
    NOT_IN_XSTAR = "not_in_Xstar"
    C1_VIOLATED = "c1_violated"


class SpaceKind(Enum):
    CONTINUOUS = "continuous"
    FINITE = "finite"


class Relation(Enum):
    LE = "<="
    LT = "<"
    EQ = "="
    GT = ">"
    GE = ">="


class Mode(Enum):
    """How region boundaries are treated by membership tests."""

    EXACT = "exact"
    CLOSURE = "closure"
    INTERIOR = "interior"


class Method(Enum):
    CLOSED_FORM = "closed_form"
    ENUMERATION = "enumeration"
    GOLDEN_SECTION = "golden_section"
    GRID_REFINE = "grid_refine"
    SIMPLEX_MULTISTART = "simplex_multistart"


class Regime(Enum):
    BOTH_NONSHARP = "both_nonsharp"
    SHARP_NULL = "sharp_null"
    SHARP_ALTERNATIVE = "sharp_alternative"


class Decision(Enum):
    ACCEPT = "accept"
    REJECT = "reject"
    MAINTAIN = "maintain"


class Philosophy(Enum):
    FISHERIAN = "fisherian"
    NEYMAN_PEARSON = "neyman_pearson"


class Interpretation(Enum):
    #: (A) the data bring no information against the region
    CONSISTENT = "consistent"
    #: (B) the data bring some information against the region
    INCONSISTENT = "inconsistent"
    #: (C) the first region is more inconsistent with the data than the second
    MORE_INCONSISTENT = "more_inconsistent"
    #: (D) every parameter value reaches the maximum likelihood
    EQUALLY_POSSIBLE = "equally_possible"
    #: (E) a single parameter value is possible, all others are impossible
    NECESSITY = "necessity"
    #: (F) the region is consistent and its complement nearly impossible
    STRONG_EVIDENCE_AGAINST_COMPLEMENT = "strong_evidence_against_complement"


# Parameter spaces


class Interval(NamedTuple):
    lower: float = -math.inf
    upper: float = math.inf
    lower_open: bool = False
    upper_open: bool = False

    def contains(self, value, mode: Mode = Mode.EXACT, tol: float = perf.MEMBERSHIP_TOL):
        """Works on floats and on numpy arrays alike."""
        if mode is Mode.EXACT:
            lower_open, upper_open = self.lower_open, self.upper_open
        else:
            lower_open = upper_open = mode is Mode.INTERIOR
        above = (value > self.lower) if lower_open else (value >= self.lower - tol)
        below = (value < self.upper) if upper_open else (value <= self.upper + tol)
        return above & below

    def clip(self, value):
        return np.clip(value, self.lower, self.upper)

    @property
    def is_bounded(self) -> bool:
        return math.isfinite(self.lower) and math.isfinite(self.upper)

    def intersect(self, other: "Interval") -> "Interval":
        if other.lower > self.lower:
            lower, lower_open = other.lower, other.lower_open
        elif other.lower < self.lower:
            lower, lower_open = self.lower, self.lower_open
        else:
            lower, lower_open = self.lower, self.lower_open or other.lower_open
        if other.upper < self.upper:
            upper, upper_open = other.upper, other.upper_open
        elif other.upper > self.upper:
            upper, upper_open = self.upper, self.upper_open
        else:
            upper, upper_open = self.upper, self.upper_open or other.upper_open
        return Interval(lower, upper, lower_open, upper_open)

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lower, other.lower), max(self.upper, other.upper))


@dataclass(frozen=True)
class ParamPoint:
    coords: Tuple[float, ...] = ()
    #: Position in the label list of a finite parameter space
    index: Optional[int] = None

    @classmethod
    def of(cls, *coords: float, index: Optional[int] = None) -> "ParamPoint":
        return cls(tuple(float(c) for c in coords), index)

    @classmethod
    def from_array(cls, values: np.ndarray, index: Optional[int] = None) -> "ParamPoint":
        return cls(tuple(float(v) for v in np.atleast_1d(values)), index)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)

    def __str__(self) -> str:
        coords = ", ".join(f"{c:.6g}" for c in self.coords)
        return f"({coords})" if self.index is None else f"#{self.index} ({coords})"


@dataclass(frozen=True)
class LinearEquality:
    coefficients: Tuple[float, ...]
    rhs: float


@dataclass(frozen=True)
class Chart:
    """Free coordinates on a box that parameterize a constrained parameter space.

    The optimizer searches over ``bounds`` and maps every probe through ``to_full``, so
    equality constraints hold exactly instead of through a penalty.
    """

    bounds: Tuple[Interval, ...]
    to_full: Callable[[np.ndarray], np.ndarray]
    to_free: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ParamSpace:
    kind: SpaceKind
    bounds: Tuple[Interval, ...] = ()
    equalities: Tuple[LinearEquality, ...] = ()
    labels: Tuple[str, ...] = ()
    points: Tuple[ParamPoint, ...] = ()
    chart: Optional[Chart] = None
    #: Coordinates used for plots; the remaining ones follow from the equalities
    display_axes: Optional[Tuple[int, ...]] = None
    axis_names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is SpaceKind.CONTINUOUS:
            if len(self.bounds) - len(self.equalities) < 1:
                raise InputError("A continuous parameter space needs at least one free dimension.")
            for i, interval in enumerate(self.bounds):
                if not interval.lower < interval.upper:
                    raise InputError(f"Bounds of coordinate {i} are empty: {interval}.")
            for equality in self.equalities:
                if len(equality.coefficients) != len(self.bounds):
                    raise InputError(f"Equality constraint {equality} has the wrong arity.")
        else:
            if not self.points:
                raise InputError("A finite parameter space needs at least one point.")
            if len(set(self.labels)) != len(self.labels) or len(self.labels) != len(self.points):
                raise InputError("Labels of a finite parameter space must be unique.")

    @classmethod
    def continuous(cls, bounds: Sequence[Interval], **kwargs) -> "ParamSpace":
        return cls(SpaceKind.CONTINUOUS, bounds=tuple(bounds), **kwargs)

    @classmethod
    def finite(cls, labels: Sequence[str], coords: Sequence[Sequence[float]]) -> "ParamSpace":
        points = tuple(
            ParamPoint(tuple(float(c) for c in point), index) for index, point in enumerate(coords)
        )
        return cls(SpaceKind.FINITE, labels=tuple(labels), points=points)

    @property
    def is_finite(self) -> bool:
        return self.kind is SpaceKind.FINITE

    @property
    def ambient_dim(self) -> int:
        if self.is_finite:
            return len(self.points[0].coords)
        return len(self.bounds)

    @property
    def dim(self) -> int:
        """Lebesgue dimension of the space (zero for finite spaces)."""
        if self.is_finite:
            return 0
        return len(self.bounds) - len(self.equalities)

    @property
    def search_bounds(self) -> Tuple[Interval, ...]:
        return self.chart.bounds if self.chart is not None else self.bounds

    @property
    def free_dim(self) -> int:
        return len(self.search_bounds)

    @property
    def plot_axes(self) -> Tuple[int, ...]:
        if self.display_axes is not None:
            return self.display_axes
        return tuple(range(self.ambient_dim))

    def to_full(self, free: np.ndarray) -> np.ndarray:
        return self.chart.to_full(free) if self.chart is not None else free

    def to_free(self, full: np.ndarray) -> np.ndarray:
        return self.chart.to_free(full) if self.chart is not None else full

    def complete(self, display: np.ndarray) -> np.ndarray:
        """Rebuild full coordinates from plot coordinates by solving the equalities."""
        display = np.atleast_2d(np.asarray(display, dtype=float))
        axes = list(self.plot_axes)
        others = [i for i in range(self.ambient_dim) if i not in axes]
        full = np.empty((display.shape[0], self.ambient_dim))
        full[:, axes] = display
        if others:
            if len(others) != len(self.equalities):
                raise UnsupportedError("Plot axes do not determine the remaining coordinates.")
            a = np.array([eq.coefficients for eq in self.equalities], dtype=float)
            b = np.array([eq.rhs for eq in self.equalities], dtype=float)
            rhs = b[None, :] - display @ a[:, axes].T
            full[:, others] = np.linalg.solve(a[:, others], rhs.T).T
        return full

    def contains_coords(self, coords: np.ndarray, tol: float = perf.MEMBERSHIP_TOL) -> np.ndarray:
        """Closure membership of each row of ``coords`` (continuous spaces)."""
        coords = np.atleast_2d(coords)
        inside = np.ones(coords.shape[0], dtype=bool)
        for i, interval in enumerate(self.bounds):
            inside &= interval.contains(coords[:, i], Mode.CLOSURE, tol)
        for equality in self.equalities:
            residual = coords @ np.asarray(equality.coefficients) - equality.rhs
            inside &= np.abs(residual) <= tol
        return inside

    def contains(self, point: ParamPoint, tol: float = perf.MEMBERSHIP_TOL) -> bool:
        if self.is_finite:
            if point.index is not None:
                return 0 <= point.index < len(self.points) and (
                    not point.coords or point.coords == self.points[point.index].coords
                )
            return any(np.allclose(point.coords, p.coords, rtol=0, atol=tol) for p in self.points)
        if len(point.coords) != self.ambient_dim:
            return False
        return bool(self.contains_coords(point.as_array(), tol)[0])

    def check_point(self, point: ParamPoint) -> ParamPoint:
        if not self.contains(point):
            raise InputError(f"Parameter point {point} does not belong to the parameter space.")
        if self.is_finite and point.index is None:
            return self.locate(point)
        return point

    def locate(self, point: ParamPoint) -> ParamPoint:
        """Return the canonical point of a finite space matching ``point``."""
        if point.index is not None:
            return self.points[point.index]
        for candidate in self.points:
            if np.allclose(point.coords, candidate.coords, rtol=0, atol=perf.MEMBERSHIP_TOL):
                return candidate
        raise InputError(f"Parameter point {point} is not one of the finite parameter values.")


@dataclass(frozen=True)
class Sample:
    data: Tuple[float, ...]
    #: Model-specific fixed constants
    meta: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def of(cls, *data: float, **meta: Any) -> "Sample":
        return cls(tuple(data), dict(meta))

    @property
    def value(self):
        if len(self.data) != 1:
            raise InputError(f"Expected a single observation, got {self.data}.")
        return self.data[0]


# Optimizer


@dataclass(frozen=True)
class OptConfig:
    rel_tol: float = perf.DEFAULT_REL_TOL
    #: Grid points per dimension; ``None`` picks a default by dimension
    grid_base: Optional[int] = None
    refine_rounds: int = perf.DEFAULT_REFINE_ROUNDS
    multistarts: int = perf.DEFAULT_MULTISTARTS
    seed: int = perf.DEFAULT_SEED
    threads: int = field(default_factory=lambda: config.THREADS)

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise InputError(f"rel_tol must be positive, got {self.rel_tol}.")
        if self.grid_base is not None and self.grid_base < 3:
            raise InputError(f"grid_base must be at least 3, got {self.grid_base}.")
        if self.refine_rounds < 0 or self.multistarts < 1 or self.threads < 1:
            raise InputError("refine_rounds, multistarts and threads must be positive.")

    def grid_points(self, dim: int) -> int:
        if self.grid_base is not None:
            return self.grid_base
        return perf.DEFAULT_GRID.get(dim, max(8, int(round(1e5 ** (1 / dim)))))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass(frozen=True)
class SupResult:
    sup_loglik: float
    witness: Optional[ParamPoint]
    method: Method
    evaluations: int
    converged: bool = True
    #: False when no point of the region was ever probed
    feasible: bool = True
    #: Local optima found on the way, best first
    candidates: Tuple[Tuple[ParamPoint, float], ...] = ()


# Evidence


@dataclass(frozen=True)
class EvidenceValue:
    nu: float
    log_nu: float
    witness: Optional[ParamPoint]
    sup: SupResult
    reference: SupResult
    interpretation: Interpretation

    @property
    def converged(self) -> bool:
        return self.sup.converged and self.reference.converged


@dataclass(frozen=True)
class PhiVerdict:
    nu0: float
    nu0c: float
    regime: Regime
    decision: Decision
    thresholds: Tuple[float, float]
    philosophy: Philosophy
    null: EvidenceValue
    alternative: EvidenceValue
    annotations: Tuple[Interpretation, ...] = ()

    @property
    def a_star(self) -> float:
        return self.thresholds[0]

    @property
    def b_star(self) -> float:
        return self.thresholds[1]

    @property
    def dichotomy_holds(self) -> bool:
        return max(self.nu0, self.nu0c) >= 1 - perf.ONE_TOL


@dataclass(frozen=True)
class RatioResult:
    """ν(R₁)/ν(R₂); undefined when ν(R₂) = 0."""

    value: Optional[float]
    numerator: EvidenceValue
    denominator: EvidenceValue
    interpretation: Optional[Interpretation] = None

    @property
    def defined(self) -> bool:
        return self.value is not None


# Contours


class GridSpec(NamedTuple):
    #: Grid points per plot axis
    resolution: int = 200
    #: Plot-axis ranges; ``None`` picks a box around the level set
    bounds: Optional[Tuple[Tuple[float, float], ...]] = None


@dataclass(frozen=True)
class ContourResult:
    alpha: float
    axis_names: Tuple[str, ...]
    #: One coordinate vector per plot axis
    axes: Tuple[np.ndarray, ...]
    #: log λ on the grid, indexed like ``np.meshgrid(*axes, indexing="ij")``
    log_lambda: np.ndarray
    inside: np.ndarray
    #: Level-set boundary pieces in plot coordinates
    segments: Tuple[Tuple[Tuple[float, ...], Tuple[float, ...]], ...] = ()
    polylines: Tuple[Tuple[Tuple[float, ...], ...], ...] = ()
    #: Maximum likelihood points, set when the contour degenerates (α = 1)
    mle: Tuple[ParamPoint, ...] = ()

    @property
    def degenerate(self) -> bool:
        return bool(self.mle)


# Bayesian comparison


@dataclass(frozen=True)
class PosteriorSummary:
    """Posterior quantities for one region; likelihoods are also kept in the log domain."""

    #: Marginal likelihood m(x) = ∫ L dπ
    m_x: float
    #: Global likelihood supremum c(x)
    c_x: float
    post_prob: float
    prior_prob: float
    #: π_x(R)·m(x) / (π(R)·c(x)); ``None`` when π(R) = 0
    bound: Optional[float]
    log_m_x: float
    log_c_x: float
    #: Largest quadrature error estimate met on the way (zero for exact sums)
    error: float = 0.0

    @property
    def bound_defined(self) -> bool:
        return self.bound is not None

    @property
    def evidence_ratio(self) -> float:
        """m(x)/c(x), computed without leaving the log domain."""
        return math.exp(self.log_m_x - self.log_c_x) if self.log_m_x > -math.inf else 0.0


@dataclass(frozen=True)
class BoundCheck:
    holds: bool
    nu: float
    bound: float
    summary: PosteriorSummary


@dataclass(frozen=True)
class ConsistencyCheck:
    #: Whether π(R) <= m(x)/c(x)
    applicable: bool
    #: π_x(R) <= ν_x(R); ``None`` when not applicable
    holds: Optional[bool]
    nu: float
    summary: PosteriorSummary


@dataclass(frozen=True)
class ImpossibilityCheck:
    holds: bool
    nu: float
    post_prob: float


@dataclass(frozen=True)
class UpperLower:
    upper: float
    lower: float
    uniform_posterior: float


# Hardy-Weinberg


class HweCase(Enum):
    MLE_IN_INBREEDING = "mle_in_inbreeding"
    MLE_IN_OUTBREEDING = "mle_in_outbreeding"
    MLE_ON_CURVE = "mle_on_curve"


class HweSample(NamedTuple):
    y1: int
    y2: int
    y3: int

    @property
    def m(self) -> int:
        return self.y1 + self.y2 + self.y3

    def as_sample(self) -> Sample:
        return Sample.of(self.y1, self.y2, self.y3)


@dataclass(frozen=True)
class HweReport:
    sample: HweSample
    nu1: float
    nu2: float
    nu3: float
    mle: ParamPoint
    case: HweCase
    tilde_theta: ParamPoint
    log_nu1: float = 0.0


@dataclass(frozen=True)
class HweFigureRow:
    report: HweReport
    #: Boundary of the level set at α = ν(Θ₁), in (θ₁, θ₃) coordinates
    polylines: Tuple[Tuple[Tuple[float, ...], ...], ...]
