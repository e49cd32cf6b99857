"""Turn an ``AnalysisSpec`` into models, samples and regions, and run one analysis on them."""
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

from lrpossib import likelihood as lk
from lrpossib import types
from lrpossib.likelihood.kernels import mesh
from lrpossib.likelihood.types import Interval, ParamPoint, Relation

logger = logging.getLogger(__name__)


# Parsing


def build_model(spec: Any, sample: Optional[lk.Sample] = None) -> lk.StatModel:
    params = spec.params
    if spec.name == "binomial":
        return lk.BinomialModel(params.n)
    if spec.name == "binomial-finite":
        return lk.BinomialModel(params.n, params.thetas)
    if spec.name == "poisson":
        return lk.PoissonModel()
    if spec.name == "normal":
        return lk.NormalModel(params.n)
    if spec.name == "trinomial":
        return lk.TrinomialModel()
    if spec.name in ("fraser", "severini"):
        cls = lk.FraserModel if spec.name == "fraser" else lk.SeveriniModel
        if params.theta_max is None:
            if sample is None:
                raise lk.InputError(f"Model {spec.name!r} needs theta_max or a sample.")
            return cls.for_observation(int(sample.value))
        return cls(params.theta_max)
    if spec.name == "finite":
        return lk.FiniteModel(params.labels, params.table, params.coords)
    raise lk.InputError(f"Unknown model {spec.name!r}; expected one of {types.MODEL_NAMES}.")


def build_sample(spec: types.SampleSpec, model_spec: Any) -> lk.Sample:
    if spec.raw is not None:
        if model_spec.name != "normal":
            raise lk.InputError("Raw observations are only reduced for the normal model.")
        sample = lk.NormalModel.summarize(spec.raw)
        if sample.meta["n"] != model_spec.params.n:
            raise lk.InputError(
                f"{sample.meta['n']} raw observations for a model with n={model_spec.params.n}."
            )
        return sample
    data = list(spec.data or [])
    if model_spec.name == "finite":
        return lk.Sample.of(*[str(v) for v in data])
    if any(isinstance(v, str) for v in data):
        raise lk.InputError(f"Sample data must be numeric for model {model_spec.name!r}.")
    return lk.Sample.of(*data)


def _interval(spec: types.IntervalSpec) -> Interval:
    return Interval(
        -math.inf if spec.lower is None else spec.lower,
        math.inf if spec.upper is None else spec.upper,
        spec.lower_open,
        spec.upper_open,
    )


def build_region(spec: Any) -> lk.Region:
    if spec.type == "full":
        return lk.Full(spec.name, spec.dim)
    if spec.type == "empty":
        return lk.Empty(spec.name, spec.dim)
    if spec.type == "finite":
        if spec.indices is not None:
            points = tuple(ParamPoint((), int(i)) for i in spec.indices)
        else:
            points = tuple(ParamPoint.of(*p) for p in spec.points)
        return lk.FiniteSet(points, spec.name, 0 if spec.dim is None else spec.dim)
    if spec.type == "box":
        return lk.Box(tuple(_interval(iv) for iv in spec.intervals), spec.name, spec.dim)
    if spec.type == "constraint":
        relation = Relation(spec.relation)
        if spec.linear is not None:
            return lk.Constraint.linear(
                spec.linear, relation, spec.rhs, dim=spec.dim, family=spec.family, name=spec.name
            )
        return lk.Constraint.named(
            spec.function, relation, spec.rhs, dim=spec.dim, family=spec.family, name=spec.name
        )
    if spec.type == "complement":
        return lk.Complement(build_region(spec.child), spec.name, spec.dim)
    members = tuple(build_region(m) for m in spec.members)
    if spec.type == "union":
        return lk.Union(members, spec.name, spec.dim)
    return lk.Intersection(members, spec.name, spec.dim)


def build_prior(spec: Any, space: lk.ParamSpace) -> lk.Prior:
    if spec.kind == "finite":
        if not space.is_finite:
            raise lk.InputError("A finite prior needs a finite parameter space.")
        if spec.weights is None:
            return lk.FinitePrior.uniform(len(space.points))
        return lk.FinitePrior(tuple(spec.weights))
    if spec.kind == "uniform":
        return lk.ContinuousPrior.uniform(spec.bounds)
    return lk.ContinuousPrior.beta(spec.a, spec.b)


def build_config(spec: types.OptimizerSpec) -> lk.OptConfig:
    kwargs: Dict[str, Any] = dict(
        rel_tol=spec.rel_tol,
        grid_base=spec.grid,
        refine_rounds=spec.refine_rounds,
        multistarts=spec.multistarts,
        seed=spec.seed,
    )
    if spec.threads is not None:
        kwargs["threads"] = spec.threads
    return lk.OptConfig(**kwargs)


class Analysis:
    """Everything an analysis needs, built once from the JSON document."""

    def __init__(self, spec: types.AnalysisSpec) -> None:
        self.spec = spec
        self.cfg = build_config(spec.optimizer)
        self.sample = build_sample(spec.sample, spec.model)
        self.model = build_model(spec.model, self.sample)
        self.regions = [build_region(r) for r in spec.regions]
        for region in self.regions:
            region.validate(self.model.space)
        self.prior = build_prior(spec.prior, self.model.space) if spec.prior else None

    def region(self, name: Optional[str] = None, position: int = 0) -> lk.Region:
        if name is not None:
            for region in self.regions:
                if region.name == name:
                    return region
            raise lk.InputError(f"No region named {name!r}.")
        if len(self.regions) <= position:
            raise lk.InputError(f"The analysis needs at least {position + 1} region(s).")
        return self.regions[position]


# Reports


def _coords(point: Optional[ParamPoint], space: Optional[lk.ParamSpace] = None) -> Optional[List]:
    if point is None:
        return None
    if not point.coords and space is not None and point.index is not None:
        point = space.points[point.index]
    return list(point.coords)


def _finite(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def sup_report(result: lk.SupResult, space: lk.ParamSpace) -> types.SupReport:
    return types.SupReport(
        sup_loglik=_finite(result.sup_loglik),
        witness=_coords(result.witness, space),
        method=result.method.value,
        evaluations=result.evaluations,
        converged=result.converged,
        feasible=result.feasible,
    )


def nu_report(value: lk.EvidenceValue, region: lk.Region, space: lk.ParamSpace) -> types.NuReport:
    return types.NuReport(
        region=lk.describe(region),
        nu=value.nu,
        log_nu=_finite(value.log_nu),
        witness=_coords(value.witness, space),
        interpretation=value.interpretation.value,
        sup=sup_report(value.sup, space),
    )


def _require_converged(*values: lk.EvidenceValue) -> None:
    for value in values:
        if not value.converged:
            raise lk.ConvergenceError(
                f"The supremum search did not converge ({value.sup.method.value}, "
                f"{value.sup.evaluations} evaluations)."
            )


def evidence(analysis: Analysis, name: Optional[str] = None) -> types.EvidenceReport:
    model, x, cfg = analysis.model, analysis.sample, analysis.cfg
    region = analysis.region(name)
    reference = lk.checked_global_sup(model, x, cfg)
    null = lk.nu(model, x, region, cfg, reference)
    complement = lk.Complement(region)
    alternative = lk.nu(model, x, complement, cfg, reference)
    _require_converged(null, alternative)
    return types.EvidenceReport(
        model=model.name,
        region=lk.describe(region),
        nu0=null.nu,
        nu0c=alternative.nu,
        null=nu_report(null, region, model.space),
        alternative=nu_report(alternative, complement, model.space),
        mle=_coords(reference.witness, model.space) or [],
        seed=cfg.seed,
    )


def phi(analysis: Analysis, name: Optional[str] = None) -> types.PhiReport:
    spec, model = analysis.spec, analysis.model
    region = analysis.region(name)
    verdict = lk.phi(
        model,
        analysis.sample,
        region,
        spec.thresholds.a_star,
        spec.thresholds.b_star,
        lk.Philosophy(spec.philosophy),
        lk.Regime(spec.regime) if spec.regime else None,
        analysis.cfg,
    )
    _require_converged(verdict.null, verdict.alternative)
    return types.PhiReport(
        model=model.name,
        region=lk.describe(region),
        nu0=verdict.nu0,
        nu0c=verdict.nu0c,
        regime=verdict.regime.value,
        decision=verdict.decision.value,
        a_star=verdict.a_star,
        b_star=verdict.b_star,
        philosophy=verdict.philosophy.value,
        annotations=[a.value for a in verdict.annotations],
        null=nu_report(verdict.null, region, model.space),
        alternative=nu_report(verdict.alternative, lk.Complement(region), model.space),
        seed=analysis.cfg.seed,
    )


def ratio(
    analysis: Analysis, first: Optional[str] = None, second: Optional[str] = None
) -> types.RatioReport:
    model = analysis.model
    r1 = analysis.region(first, 0)
    r2 = analysis.region(second, 1)
    result = lk.likelihood_ratio_R(model, analysis.sample, r1, r2, analysis.cfg)
    _require_converged(result.numerator, result.denominator)
    return types.RatioReport(
        model=model.name,
        first=lk.describe(r1),
        second=lk.describe(r2),
        value=result.value,
        defined=result.defined,
        interpretation=result.interpretation.value if result.interpretation else None,
        numerator=nu_report(result.numerator, r1, model.space),
        denominator=nu_report(result.denominator, r2, model.space),
        seed=analysis.cfg.seed,
    )


def contour(
    analysis: Analysis, name: Optional[str] = None
) -> Tuple[types.ContourReport, lk.ContourResult]:
    spec, model = analysis.spec, analysis.model
    alpha = spec.alpha
    if alpha is None:
        region = analysis.region(name)
        value = lk.nu(model, analysis.sample, region, analysis.cfg)
        _require_converged(value)
        alpha = value.nu
        logger.info("Contour level taken from nu(%s) = %.6g", lk.describe(region), alpha)
    if not alpha > 0:
        raise lk.InputError("The region is impossible (nu = 0); there is no contour to draw.")
    bounds = tuple(tuple(b) for b in spec.grid.bounds) if spec.grid.bounds else None
    grid = lk.GridSpec(spec.grid.resolution, bounds)
    result = lk.contour(model, analysis.sample, alpha, grid, analysis.cfg)
    report = types.ContourReport(
        model=model.name,
        alpha=alpha,
        axis_names=list(result.axis_names),
        points_inside=int(result.inside.sum()),
        points_total=int(result.inside.size),
        degenerate=result.degenerate,
        mle=[list(p.coords) for p in result.mle],
        polylines=[[list(p) for p in line] for line in result.polylines],
    )
    return report, result


def contour_rows(result: lk.ContourResult) -> Tuple[List[str], List[List[Any]]]:
    """Long format: one row per grid point."""
    header = ["alpha", *result.axis_names, "lambda", "inside"]
    rows = []
    for coords, log_lambda, inside in zip(
        mesh(result.axes), result.log_lambda.reshape(-1), result.inside.reshape(-1)
    ):
        rows.append([result.alpha, *map(float, coords), math.exp(log_lambda), int(inside)])
    return header, rows


def bayes_bound(analysis: Analysis, name: Optional[str] = None) -> types.BayesReport:
    model, x, cfg = analysis.model, analysis.sample, analysis.cfg
    if analysis.prior is None:
        raise lk.InputError("The bayes-bound analysis needs a prior.")
    region = analysis.region(name)
    summary = lk.posterior_prob(model, x, analysis.prior, region, cfg)
    nu_value = lk.nu(model, x, region, cfg)
    _require_converged(nu_value)
    lemma2 = None
    if summary.bound_defined:
        lemma2 = lk.lemma2_check(model, x, analysis.prior, region, cfg).holds
    corollary = lk.corollary1_check(model, x, analysis.prior, region, cfg)
    impossible = lk.impossibility_check(model, x, analysis.prior, region, cfg)
    upper_lower = None
    if model.space.is_finite:
        wm = lk.walley_moral(model, x, region, cfg)
        upper_lower = types.UpperLowerReport(
            upper=wm.upper, lower=wm.lower, uniform_posterior=wm.uniform_posterior
        )
    return types.BayesReport(
        model=model.name,
        region=lk.describe(region),
        nu=nu_value.nu,
        post_prob=summary.post_prob,
        prior_prob=summary.prior_prob,
        m_x=summary.m_x,
        c_x=summary.c_x,
        log_m_x=_finite(summary.log_m_x),
        log_c_x=summary.log_c_x,
        bound=summary.bound,
        lemma2_holds=lemma2,
        corollary1_applicable=corollary.applicable,
        corollary1_holds=corollary.holds,
        impossibility_holds=impossible.holds,
        walley_moral=upper_lower,
    )


# Hardy-Weinberg


def hwe_report_model(
    report: lk.HweReport, polylines: Optional[Sequence] = None
) -> types.HweReportModel:
    sample = report.sample
    return types.HweReportModel(
        y1=sample.y1,
        y2=sample.y2,
        y3=sample.y3,
        m=sample.m,
        nu1=report.nu1,
        nu2=report.nu2,
        nu3=report.nu3,
        log_nu1=_finite(report.log_nu1),
        mle=list(report.mle.coords),
        tilde_theta=list(report.tilde_theta.coords),
        case=report.case.value,
        polylines=None if polylines is None else [[list(p) for p in line] for line in polylines],
    )


HWE_COLUMNS = ["y1", "y2", "y3", "theta1_hat", "theta3_hat", "nu1", "nu2", "nu3", "case"]


def hwe_rows(reports: Sequence[lk.HweReport]) -> Tuple[List[str], List[List[Any]]]:
    rows = []
    for r in reports:
        s = r.sample
        rows.append(
            [s.y1, s.y2, s.y3, r.mle.coords[0], r.mle.coords[2], r.nu1, r.nu2, r.nu3, r.case.value]
        )
    return HWE_COLUMNS, rows
