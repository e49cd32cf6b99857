"""Posterior quantities under user priors, set against the likelihood-ratio measure."""
import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, stats
from scipy.special import logsumexp

from lrpossib.likelihood import kernels, perf
from lrpossib.likelihood.evidence import nu
from lrpossib.likelihood.models import StatModel
from lrpossib.likelihood.optimize import DEFAULT_CONFIG, checked_global_sup
from lrpossib.likelihood.regions import Complement, Empty, Full, Region, describe, simplify
from lrpossib.likelihood.types import (
    BoundCheck,
    ConsistencyCheck,
    ImpossibilityCheck,
    InputError,
    Interval,
    Mode,
    OptConfig,
    ParamSpace,
    PosteriorSummary,
    PreconditionError,
    QuadratureError,
    Sample,
    UnsupportedError,
    UpperLower,
)

logger = logging.getLogger(__name__)

#: Density over coordinate rows
Density = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FinitePrior:
    weights: Tuple[float, ...]

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=float)
        if weights.ndim != 1 or weights.size == 0:
            raise InputError("A finite prior needs at least one weight.")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise InputError(f"Prior weights must be finite and nonnegative, got {self.weights}.")
        if abs(weights.sum() - 1) > perf.PRIOR_NORMALIZATION_TOL:
            raise InputError(f"Prior weights sum to {weights.sum():.9g}, not 1.")

    @classmethod
    def uniform(cls, size: int) -> "FinitePrior":
        return cls(tuple([1.0 / size] * size))

    def check(self, space: ParamSpace) -> None:
        if not space.is_finite:
            raise InputError("A finite prior needs a finite parameter space.")
        if len(self.weights) != len(space.points):
            raise InputError(
                f"The prior has {len(self.weights)} weights for {len(space.points)} parameters."
            )


@dataclass(frozen=True)
class ContinuousPrior:
    """A density on a bounded box of one or two coordinates, normalized at construction."""

    density: Density
    support: Tuple[Interval, ...]
    name: str = "custom"

    def __post_init__(self) -> None:
        if len(self.support) not in (1, 2):
            raise UnsupportedError(
                f"Continuous priors support one or two dimensions, got {len(self.support)}."
            )
        if not all(interval.is_bounded for interval in self.support):
            raise InputError("The support of a continuous prior must be bounded.")
        total, error = _integrate_box(lambda coords: self(coords), self.support, Full())
        if abs(total - 1) > perf.PRIOR_NORMALIZATION_TOL:
            raise InputError(
                f"Prior density {self.name!r} integrates to {total:.9g} over its support, not 1."
            )
        logger.debug("Prior %s normalized to %.12g (+/- %.2g)", self.name, total, error)

    def __call__(self, coords: np.ndarray) -> np.ndarray:
        coords = np.atleast_2d(coords)
        inside = np.ones(coords.shape[0], dtype=bool)
        for i, interval in enumerate(self.support):
            inside &= interval.contains(coords[:, i], Mode.CLOSURE)
        with np.errstate(divide="ignore", invalid="ignore"):
            values = np.asarray(self.density(coords), dtype=float).reshape(-1)
        return np.where(inside & np.isfinite(values), values, 0.0)

    @classmethod
    def uniform(cls, bounds: Sequence[Tuple[float, float]]) -> "ContinuousPrior":
        volume = float(np.prod([hi - lo for lo, hi in bounds]))
        if not volume > 0:
            raise InputError(f"Uniform prior bounds {bounds} enclose no volume.")
        return cls(
            lambda coords: np.full(np.atleast_2d(coords).shape[0], 1.0 / volume),
            tuple(Interval(float(lo), float(hi)) for lo, hi in bounds),
            name="uniform",
        )

    @classmethod
    def beta(cls, a: float, b: float) -> "ContinuousPrior":
        if not (a > 0 and b > 0):
            raise InputError(f"Beta prior parameters must be positive, got ({a}, {b}).")
        return cls(
            lambda coords: stats.beta.pdf(np.atleast_2d(coords)[:, 0], a, b),
            (Interval(0.0, 1.0),),
            name=f"beta({a:g}, {b:g})",
        )

    def check(self, space: ParamSpace) -> None:
        if space.is_finite:
            raise InputError("A continuous prior needs a continuous parameter space.")
        if space.equalities:
            raise UnsupportedError("Priors on constrained parameter spaces are not supported.")
        if len(self.support) != space.ambient_dim:
            raise InputError(
                f"The prior is {len(self.support)}-dimensional; the space has {space.ambient_dim}."
            )


Prior = Union[FinitePrior, ContinuousPrior]


# Quadrature


def _quad(f: Callable[[float], float], lower: float, upper: float, hints=()) -> Tuple[float, float]:
    points = [p for p in hints if lower < p < upper] or None
    out = integrate.quad(
        f,
        lower,
        upper,
        epsabs=perf.QUAD_ABS_TOL,
        epsrel=perf.QUAD_REL_TOL,
        limit=perf.QUAD_LIMIT,
        points=points,
        full_output=1,
    )
    value, error = out[0], out[1]
    if len(out) > 3:
        if error > perf.QUAD_FAIL_REL * max(abs(value), perf.QUAD_ABS_TOL):
            raise QuadratureError(
                f"Adaptive quadrature failed on [{lower:g}, {upper:g}]: {out[3]}", error
            )
        logger.warning("Quadrature on [%g, %g]: %s", lower, upper, out[3].strip())
    return value, error


def _member_intervals(
    region: Region, lower: float, upper: float, embed: Callable[[np.ndarray], np.ndarray]
) -> List[Tuple[float, float]]:
    """Sub-intervals of ``[lower, upper]`` whose embedded points lie in ``region``."""
    if isinstance(region, Full):
        return [(lower, upper)]
    if isinstance(region, Empty):
        return []
    ts = np.linspace(lower, upper, perf.QUAD_SCAN_POINTS)
    mask = region.contains_coords(embed(ts), Mode.EXACT)

    def inside(t: float) -> bool:
        return bool(region.contains_coords(embed(np.array([t])), Mode.EXACT)[0])

    intervals = []
    for start, stop in kernels.feasible_runs(mask):
        a = lower if start == 0 else kernels.bisect_boundary(inside, ts[start], ts[start - 1])
        if stop == len(ts) - 1:
            b = upper
        else:
            b = kernels.bisect_boundary(inside, ts[stop], ts[stop + 1])
        if b > a:
            intervals.append((float(a), float(b)))
    return intervals


def _integrate_box(
    f: Callable[[np.ndarray], np.ndarray],
    support: Sequence[Interval],
    region: Region,
    hints: Sequence[float] = (),
) -> Tuple[float, float]:
    """∫ f over ``support ∩ region``; ``f`` maps coordinate rows to values."""
    hints = list(hints)
    if len(support) == 1:
        total = error = 0.0
        for a, b in _member_intervals(
            region, support[0].lower, support[0].upper, lambda ts: ts[:, None]
        ):
            value, err = _quad(lambda t: float(f(np.array([[t]]))[0]), a, b, hints[:1])
            total += value
            error += err
        return total, error

    outer, inner_iv = support
    inner_hint = hints[1:2]
    errors = []

    def slice_integral(u: float) -> float:
        total = 0.0
        embed = lambda ts: np.column_stack([np.full(len(ts), u), ts])  # noqa: E731
        for a, b in _member_intervals(region, inner_iv.lower, inner_iv.upper, embed):
            value, err = _quad(lambda t: float(f(np.array([[u, t]]))[0]), a, b, inner_hint)
            total += value
            errors.append(err)
        return total

    value, err = _quad(slice_integral, outer.lower, outer.upper, hints[:1])
    return value, err + (max(errors) if errors else 0.0)


# Posterior quantities


def prior_prob(prior: Prior, region: Region, space: ParamSpace) -> float:
    """π(region)."""
    prior.check(space)
    region.validate(space)
    region = simplify(region)
    if isinstance(region, Full):
        return 1.0
    if isinstance(region, Empty):
        return 0.0
    if isinstance(prior, FinitePrior):
        return float(
            sum(w for w, p in zip(prior.weights, space.points) if region.contains(p, Mode.EXACT))
        )
    value, _ = _integrate_box(prior, prior.support, region)
    return min(max(value, 0.0), 1.0)


def posterior_prob(
    model: StatModel,
    x: Sample,
    prior: Prior,
    region: Region,
    cfg: OptConfig = DEFAULT_CONFIG,
) -> PosteriorSummary:
    """π_x(region) together with m(x), c(x), π(region) and the posterior bound."""
    space = model.space
    prior.check(space)
    region.validate(space)
    region = simplify(region)
    reference = checked_global_sup(model, x, cfg)
    log_c = reference.sup_loglik

    if isinstance(prior, FinitePrior):
        logs = np.array([model.loglik(p, x) for p in space.points])
        weights = np.asarray(prior.weights, dtype=float)
        member = np.array([region.contains(p, Mode.EXACT) for p in space.points], dtype=bool)
        log_total = _log_weighted_sum(logs, weights)
        log_region = _log_weighted_sum(logs[member], weights[member])
        prior_mass = float(weights[member].sum())
        error = 0.0
    else:
        mle = reference.witness.coords if reference.witness is not None else ()

        def scaled(coords: np.ndarray) -> np.ndarray:
            values = np.exp(model.loglik_many(coords, x) - log_c)
            return values * prior(coords)

        ratio, total_error = _integrate_box(scaled, prior.support, Full(), mle)
        if isinstance(region, Full):
            region_ratio, region_error = ratio, total_error
        else:
            region_ratio, region_error = _integrate_box(scaled, prior.support, region, mle)
        log_total = log_c + math.log(ratio) if ratio > 0 else -math.inf
        log_region = log_c + math.log(region_ratio) if region_ratio > 0 else -math.inf
        prior_mass = prior_prob(prior, region, space)
        error = max(total_error, region_error)

    if log_total == -math.inf:
        raise PreconditionError("The prior gives the observed sample zero marginal likelihood.")
    post = min(math.exp(log_region - log_total), 1.0) if log_region > -math.inf else 0.0
    if prior_mass > 0:
        bound: Optional[float] = post * math.exp(log_total - log_c) / prior_mass
    else:
        bound = None
        logger.info("pi(%s) = 0: the posterior bound is undefined", describe(region))
    summary = PosteriorSummary(
        m_x=_safe_exp(log_total),
        c_x=_safe_exp(log_c),
        post_prob=post,
        prior_prob=prior_mass,
        bound=bound,
        log_m_x=log_total,
        log_c_x=log_c,
        error=error,
    )
    logger.info(
        "pi_x(%s) = %.6g, pi(%s) = %.6g, m/c = %.6g",
        describe(region),
        post,
        describe(region),
        prior_mass,
        summary.evidence_ratio,
    )
    return summary


def _log_weighted_sum(logs: np.ndarray, weights: np.ndarray) -> float:
    keep = weights > 0
    if not np.any(keep & (logs > -math.inf)):
        return -math.inf
    return float(logsumexp(logs[keep], b=weights[keep]))


def _safe_exp(value: float) -> float:
    return math.exp(value) if value < perf.LOGLIK_CAP else math.inf


def lemma2_check(
    model: StatModel, x: Sample, prior: Prior, region: Region, cfg: OptConfig = DEFAULT_CONFIG
) -> BoundCheck:
    """ν_x(R) >= π_x(R)·m(x) / (π(R)·c(x)) for any region with positive prior mass."""
    summary = posterior_prob(model, x, prior, region, cfg)
    if summary.bound is None:
        raise PreconditionError(f"The bound needs pi({describe(region)}) > 0.")
    value = nu(model, x, region, cfg).nu
    tol = perf.BOUND_TOL + summary.error
    return BoundCheck(value >= summary.bound - tol, value, summary.bound, summary)


def corollary1_check(
    model: StatModel, x: Sample, prior: Prior, region: Region, cfg: OptConfig = DEFAULT_CONFIG
) -> ConsistencyCheck:
    """When π(R) <= m(x)/c(x), probability never exceeds possibility: π_x(R) <= ν_x(R)."""
    summary = posterior_prob(model, x, prior, region, cfg)
    value = nu(model, x, region, cfg).nu
    applicable = summary.prior_prob <= summary.evidence_ratio
    holds = None
    if applicable:
        holds = summary.post_prob <= value + perf.BOUND_TOL + summary.error
    return ConsistencyCheck(applicable, holds, value, summary)


def impossibility_check(
    model: StatModel, x: Sample, prior: Prior, region: Region, cfg: OptConfig = DEFAULT_CONFIG
) -> ImpossibilityCheck:
    """An impossible region (ν = 0) is improbable (π_x = 0)."""
    summary = posterior_prob(model, x, prior, region, cfg)
    value = nu(model, x, region, cfg).nu
    tol = perf.QUAD_REL_TOL if isinstance(prior, ContinuousPrior) else 0.0
    return ImpossibilityCheck(value > 0 or summary.post_prob <= tol, value, summary.post_prob)


def walley_moral(
    model: StatModel, x: Sample, region: Region, cfg: OptConfig = DEFAULT_CONFIG
) -> UpperLower:
    """Upper and lower probabilities on the normalized likelihood scale, plus the flat posterior."""
    space = model.space
    if not space.is_finite:
        raise UnsupportedError("Upper and lower probabilities need a finite parameter space.")
    reference = checked_global_sup(model, x, cfg)
    upper = nu(model, x, region, cfg, reference).nu
    lower = 1.0 - nu(model, x, Complement(region), cfg, reference).nu
    logs = np.array([model.loglik(p, x) for p in space.points])
    member = np.array([region.contains(p, Mode.EXACT) for p in space.points], dtype=bool)
    ones = np.ones(len(logs))
    log_region = _log_weighted_sum(logs[member], ones[member])
    posterior = math.exp(log_region - _log_weighted_sum(logs, ones)) if member.any() else 0.0
    return UpperLower(upper, lower, min(posterior, 1.0))
