from .types import (  # isort:skip
    BoundCheck,
    Chart,
    ConsistencyCheck,
    ContourResult,
    ConvergenceError,
    Decision,
    EvidenceValue,
    GridSpec,
    HweCase,
    HweFigureRow,
    HweReport,
    HweSample,
    ImpossibilityCheck,
    InputError,
    Interpretation,
    Interval,
    LinearEquality,
    Method,
    Mode,
    OptConfig,
    ParamPoint,
    ParamSpace,
    Philosophy,
    PhiVerdict,
    PossibilityError,
    PosteriorSummary,
    PreconditionError,
    QuadratureError,
    RatioResult,
    Regime,
    RegimeError,
    RegionError,
    Relation,
    Sample,
    SampleError,
    SampleStatus,
    SpaceKind,
    SupResult,
    UnsupportedError,
    UpperLower,
)
from . import perf
from .bayes import (
    ContinuousPrior,
    FinitePrior,
    Prior,
    corollary1_check,
    impossibility_check,
    lemma2_check,
    posterior_prob,
    prior_prob,
    walley_moral,
)
from .contour import contour
from .discrete import (
    FraserModel,
    SeveriniModel,
    ThreePointModel,
    fraser_coverage,
    severini_coverage,
    severini_T,
)
from .evidence import (
    classify_points,
    derive_regime,
    lambda_level_set_membership,
    likelihood_ratio_R,
    nu,
    phi,
    point_possibilities,
    region_dim,
)
from .hwe import (
    hwe_curve_sup,
    hwe_figure_data,
    hwe_regions,
    hwe_report,
    hwe_sample,
    hwe_sample_grid,
    parse_counts,
)
from .models import (
    BinomialModel,
    FiniteModel,
    NormalModel,
    PoissonModel,
    StatModel,
    TrinomialModel,
    binom_nu,
    equilibrium_point,
    hwe_side,
    normal_nu,
    poisson_nu,
)
from .optimize import (
    DEFAULT_CONFIG,
    checked_global_sup,
    global_sup,
    mle_set,
    restricted_sup,
    validate_sample,
)
from .regions import (
    CONSTRAINT_FUNCTIONS,
    Box,
    Complement,
    Constraint,
    Empty,
    FiniteSet,
    Full,
    Intersection,
    Predicate,
    Region,
    Union,
    describe,
    region_membership,
    relative_to,
    simplify,
)
