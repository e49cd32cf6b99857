import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Optional

from lrpossib.likelihood import perf
from lrpossib.likelihood.models import StatModel
from lrpossib.likelihood.optimize import DEFAULT_CONFIG, checked_global_sup, restricted_sup
from lrpossib.likelihood.regions import (
    Box,
    Complement,
    Constraint,
    Empty,
    FiniteSet,
    Full,
    Intersection,
    Region,
    Union,
    describe,
    simplify,
)
from lrpossib.likelihood.types import (
    Decision,
    EvidenceValue,
    InputError,
    Interpretation,
    OptConfig,
    ParamPoint,
    ParamSpace,
    Philosophy,
    PhiVerdict,
    RatioResult,
    Regime,
    RegimeError,
    Relation,
    Sample,
    SupResult,
    UnsupportedError,
)

logger = logging.getLogger(__name__)


def nu(
    model: StatModel,
    x: Sample,
    region: Region,
    cfg: OptConfig = DEFAULT_CONFIG,
    reference: Optional[SupResult] = None,
) -> EvidenceValue:
    """The likelihood-ratio measure ν_x(region), computed in the log domain."""
    if reference is None:
        reference = checked_global_sup(model, x, cfg)
    region.validate(model.space)
    simple = simplify(region)
    if isinstance(simple, Full):
        value = EvidenceValue(
            1.0, 0.0, reference.witness, reference, reference, Interpretation.CONSISTENT
        )
    elif isinstance(simple, Empty):
        empty = SupResult(-math.inf, None, reference.method, 0, feasible=False)
        value = EvidenceValue(0.0, -math.inf, None, empty, reference, Interpretation.INCONSISTENT)
    else:
        sup = restricted_sup(model, x, simple, cfg)
        log_nu = min(sup.sup_loglik - reference.sup_loglik, 0.0)
        if sup.sup_loglik == -math.inf:
            log_nu = -math.inf
        elif sup.sup_loglik > reference.sup_loglik:
            logger.debug(
                "Restricted supremum %s exceeds the global one %s; clamping",
                sup.sup_loglik,
                reference.sup_loglik,
            )
        nu_value = math.exp(log_nu)
        value = EvidenceValue(
            nu_value, log_nu, sup.witness, sup, reference, _interpret(nu_value)
        )
    logger.info("nu(%s) = %.6g", describe(region), value.nu)
    return value


def _interpret(value: float) -> Interpretation:
    if value >= 1 - perf.ONE_TOL:
        return Interpretation.CONSISTENT
    return Interpretation.INCONSISTENT


def lambda_level_set_membership(
    model: StatModel,
    x: Sample,
    theta: ParamPoint,
    alpha: float,
    cfg: OptConfig = DEFAULT_CONFIG,
    reference: Optional[SupResult] = None,
) -> bool:
    """Whether λ(θ, x) >= α, i.e. θ belongs to the level set Λ_α(x)."""
    if not 0 <= alpha <= 1:
        raise InputError(f"alpha={alpha} is outside [0, 1].")
    theta = model.space.check_point(theta)
    if alpha == 0:
        return True
    if reference is None:
        reference = checked_global_sup(model, x, cfg)
    log_lambda = model.loglik(theta, x) - reference.sup_loglik
    return log_lambda >= math.log(alpha)


def likelihood_ratio_R(
    model: StatModel,
    x: Sample,
    first: Region,
    second: Region,
    cfg: OptConfig = DEFAULT_CONFIG,
) -> RatioResult:
    """ν(first)/ν(second), undefined when ν(second) = 0."""
    reference = checked_global_sup(model, x, cfg)
    numerator = nu(model, x, first, cfg, reference)
    denominator = nu(model, x, second, cfg, reference)
    if denominator.nu == 0:
        logger.info("Ratio undefined: nu(%s) = 0", describe(second))
        return RatioResult(None, numerator, denominator)
    if numerator.nu == 0:
        value = 0.0
    else:
        value = math.exp(numerator.log_nu - denominator.log_nu)
    interpretation = Interpretation.MORE_INCONSISTENT if value < 1 else None
    return RatioResult(value, numerator, denominator, interpretation)


# Hypothesis testing


def region_dim(region: Region, space: ParamSpace) -> Optional[int]:
    """Declared or evident Lebesgue dimension of a region; ``None`` when unknown."""
    if region.dim is not None:
        return region.dim
    full = space.dim
    simple = simplify(region)
    if isinstance(simple, Full):
        return full
    if isinstance(simple, (Empty, FiniteSet)):
        return 0
    if isinstance(region, Box) and not space.equalities:
        return sum(1 for iv in region.intervals if iv.upper > iv.lower)
    if isinstance(region, Constraint):
        return None if region.relation is Relation.EQ else full
    if isinstance(region, Complement):
        # Removing a region from the space leaves a full-dimensional remainder
        return None if region_dim(region.child, space) is None else full
    dims = [region_dim(m, space) for m in region.children]
    if not dims or any(d is None for d in dims):
        return None
    if isinstance(region, Union):
        return max(dims)
    if isinstance(region, Intersection):
        return min(dims)
    return None


def derive_regime(space: ParamSpace, region: Region) -> Regime:
    if space.is_finite:
        return Regime.BOTH_NONSHARP
    full = space.dim
    null_dim = region_dim(region, space)
    if null_dim is None:
        raise InputError(
            f"Cannot tell whether {describe(region)} is sharp; declare its dimension or a regime."
        )
    if null_dim < full:
        return Regime.SHARP_NULL
    if isinstance(region, Complement):
        alternative_dim = region_dim(region.child, space)
        if alternative_dim is None:
            raise InputError(
                f"Cannot tell whether the complement of {describe(region)} is sharp; "
                "declare a regime."
            )
        if alternative_dim < full:
            return Regime.SHARP_ALTERNATIVE
    return Regime.BOTH_NONSHARP


def phi(
    model: StatModel,
    x: Sample,
    region: Region,
    a_star: float = perf.A_STAR,
    b_star: float = perf.B_STAR,
    philosophy: Philosophy = Philosophy.NEYMAN_PEARSON,
    regime: Optional[Regime] = None,
    cfg: OptConfig = DEFAULT_CONFIG,
    one_tol: float = perf.ONE_TOL,
) -> PhiVerdict:
    """The pair ⟨ν(Θ₀), ν(Θ₀ᶜ)⟩ and the accept / reject / maintain decision."""
    for label, threshold in (("a_star", a_star), ("b_star", b_star)):
        if not 0 < threshold < 1:
            raise InputError(f"{label}={threshold} is outside (0, 1).")
    if regime is None:
        regime = derive_regime(model.space, region)
    reference = checked_global_sup(model, x, cfg)
    complement = Complement(region)
    if cfg.threads > 1:
        with ThreadPoolExecutor(2) as executor:
            null_future = executor.submit(nu, model, x, region, cfg, reference)
            alternative_future = executor.submit(nu, model, x, complement, cfg, reference)
            null, alternative = null_future.result(), alternative_future.result()
    else:
        null = nu(model, x, region, cfg, reference)
        alternative = nu(model, x, complement, cfg, reference)
    nu0, nu0c = null.nu, alternative.nu

    if regime is Regime.SHARP_NULL and nu0c < 1 - perf.REGIME_TOL:
        raise RegimeError(
            f"A sharp null needs nu(complement) = 1, but it is {nu0c:.6g}; the region and its "
            "complement do not meet, so the null is not sharp."
        )
    if regime is Regime.SHARP_ALTERNATIVE and nu0 < 1 - perf.REGIME_TOL:
        raise RegimeError(
            f"A sharp alternative needs nu(null) = 1, but it is {nu0:.6g}; the region and its "
            "complement do not meet, so the alternative is not sharp."
        )

    can_reject = regime is not Regime.SHARP_ALTERNATIVE
    can_accept = regime is not Regime.SHARP_NULL and philosophy is not Philosophy.FISHERIAN
    if can_reject and nu0 <= a_star and nu0c >= 1 - one_tol:
        decision = Decision.REJECT
    elif can_accept and nu0 >= 1 - one_tol and nu0c <= b_star:
        decision = Decision.ACCEPT
    else:
        decision = Decision.MAINTAIN

    annotations = [null.interpretation]
    if nu0 >= 1 - one_tol and nu0c <= b_star:
        annotations.append(Interpretation.STRONG_EVIDENCE_AGAINST_COMPLEMENT)
    logger.info(
        "phi(%s) = <%.6g, %.6g> under %s: %s",
        describe(region),
        nu0,
        nu0c,
        regime.value,
        decision.value,
    )
    return PhiVerdict(
        nu0,
        nu0c,
        regime,
        decision,
        (a_star, b_star),
        philosophy,
        null,
        alternative,
        tuple(annotations),
    )


# Pointwise views of finite spaces


def point_possibilities(
    model: StatModel, x: Sample, cfg: OptConfig = DEFAULT_CONFIG
) -> Dict[str, float]:
    """ν_x({θ}) for every θ of a finite parameter space, keyed by label."""
    if not model.space.is_finite:
        raise UnsupportedError("Pointwise possibilities need a finite parameter space.")
    reference = checked_global_sup(model, x, cfg)
    values = {}
    for label, point in zip(model.space.labels, model.space.points):
        log_lambda = model.loglik(point, x) - reference.sup_loglik
        values[label] = math.exp(min(log_lambda, 0.0)) if log_lambda > -math.inf else 0.0
    return values


def classify_points(
    model: StatModel, x: Sample, cfg: OptConfig = DEFAULT_CONFIG
) -> Optional[Interpretation]:
    """``EQUALLY_POSSIBLE`` when every θ is fully possible, ``NECESSITY`` when one θ is the only
    possible value, ``None`` otherwise."""
    values = list(point_possibilities(model, x, cfg).values())
    if all(v >= 1 - perf.ONE_TOL for v in values):
        return Interpretation.EQUALLY_POSSIBLE
    if sum(1 for v in values if v > 0) == 1:
        return Interpretation.NECESSITY
    return None
