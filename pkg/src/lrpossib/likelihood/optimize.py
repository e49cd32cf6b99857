"""Restricted suprema of the log-likelihood over region trees."""
import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple

import numpy as np

from lrpossib.likelihood import kernels, perf
from lrpossib.likelihood.kernels import Optimum
from lrpossib.likelihood.models import StatModel
from lrpossib.likelihood.regions import (
    Empty,
    FiniteSet,
    Full,
    Region,
    Union,
    describe,
    relative_to,
    simplify,
)
from lrpossib.likelihood.types import (
    Interval,
    Method,
    Mode,
    OptConfig,
    ParamPoint,
    Sample,
    SampleError,
    SampleStatus,
    SupResult,
)

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = OptConfig()


def restricted_sup(
    model: StatModel, x: Sample, region: Region, cfg: OptConfig = DEFAULT_CONFIG
) -> SupResult:
    """sup{loglik(θ, x): θ in the closure of ``region``}."""
    region.validate(model.space)
    region = relative_to(simplify(region), model.space)
    if isinstance(region, Empty):
        return SupResult(-math.inf, None, Method.CLOSED_FORM, 0, feasible=False)
    if isinstance(region, Union):
        return _union_sup(model, x, region, cfg)
    if model.space.is_finite:
        return _enumerate_space(model, x, region)
    if isinstance(region, Full):
        mle = model.global_mle(x)
        if mle:
            return _closed_form(model, x, mle)
    if region.family is not None and region.family in model.closed_form:
        logger.debug("Closed form %r for %s", region.family, describe(region))
        return _closed_form(model, x, [model.closed_form[region.family](x)])
    if isinstance(region, FiniteSet):
        return _enumerate_points(model, x, region)
    return _numeric_sup(model, x, region, cfg)


def global_sup(model: StatModel, x: Sample, cfg: OptConfig = DEFAULT_CONFIG) -> SupResult:
    return restricted_sup(model, x, Full(), cfg)


def checked_global_sup(model: StatModel, x: Sample, cfg: OptConfig = DEFAULT_CONFIG) -> SupResult:
    """Global supremum after checking that ``x`` is admissible; raises ``SampleError`` if not."""
    model.check_sample(x)
    result = global_sup(model, x, cfg)
    status = _status(result)
    if status is SampleStatus.C1_VIOLATED:
        raise SampleError(status, "The likelihood is zero everywhere for this sample.")
    if status is SampleStatus.NOT_IN_XSTAR:
        raise SampleError(status, "The likelihood is unbounded for this sample.")
    return result


def validate_sample(
    model: StatModel, x: Sample, cfg: OptConfig = DEFAULT_CONFIG
) -> SampleStatus:
    """Classify ``x``; raises ``InputError`` when ``x`` is outside the sample space."""
    model.check_sample(x)
    try:
        result = global_sup(model, x, cfg)
    except SampleError as error:
        logger.warning("Sample %s: %s", x.data, error)
        return error.status
    return _status(result)


def _status(result: SupResult) -> SampleStatus:
    if result.sup_loglik > perf.LOGLIK_CAP or math.isnan(result.sup_loglik):
        return SampleStatus.NOT_IN_XSTAR
    if result.sup_loglik == -math.inf:
        return SampleStatus.C1_VIOLATED
    return SampleStatus.OK


def mle_set(model: StatModel, x: Sample, cfg: OptConfig = DEFAULT_CONFIG) -> List[ParamPoint]:
    """Parameter values that reach the maximum likelihood."""
    reference = checked_global_sup(model, x, cfg)
    threshold = reference.sup_loglik + math.log1p(-perf.MLE_SET_TOL)
    if model.space.is_finite:
        return [p for p in model.space.points if model.loglik(p, x) >= threshold]
    mle = model.global_mle(x)
    if mle:
        candidates = [(p, model.loglik(p, x)) for p in mle]
    else:
        candidates = list(reference.candidates)
    kept: List[ParamPoint] = []
    for point, value in candidates:
        if value < threshold:
            continue
        if all(
            np.max(np.abs(point.as_array() - other.as_array())) > perf.MLE_DEDUP_RESOLUTION
            for other in kept
        ):
            kept.append(point)
    return sorted(kept, key=lambda p: p.coords)


# Dispatch targets


def _best_point(scored: Sequence[Tuple[ParamPoint, float]]) -> Tuple[Optional[ParamPoint], float]:
    best_point, best_value = None, -math.inf
    for point, value in scored:
        if best_point is None or kernels.better(
            (value, point.coords), (best_value, best_point.coords)
        ):
            best_point, best_value = point, value
    return best_point, best_value


def _ranked(scored: Sequence[Tuple[ParamPoint, float]]) -> Tuple[Tuple[ParamPoint, float], ...]:
    return tuple(sorted(scored, key=lambda item: (-item[1], item[0].coords)))


def _closed_form(model: StatModel, x: Sample, points: Sequence[ParamPoint]) -> SupResult:
    scored = [(p, model.loglik(p, x)) for p in points]
    witness, value = _best_point(scored)
    return SupResult(value, witness, Method.CLOSED_FORM, len(points), candidates=_ranked(scored))


def _enumerate_space(model: StatModel, x: Sample, region: Region) -> SupResult:
    members = [p for p in model.space.points if region.contains(p, Mode.EXACT)]
    if not members:
        return SupResult(-math.inf, None, Method.ENUMERATION, 0, feasible=False)
    scored = [(p, model.loglik(p, x)) for p in members]
    witness, value = _best_point(scored)
    if value == -math.inf:
        witness = None
    return SupResult(value, witness, Method.ENUMERATION, len(members), candidates=_ranked(scored))


def _enumerate_points(model: StatModel, x: Sample, region: FiniteSet) -> SupResult:
    members = [p for p in region.points if model.space.contains(p)]
    if not members:
        return SupResult(-math.inf, None, Method.ENUMERATION, 0, feasible=False)
    scored = [(p, model.loglik(p, x)) for p in members]
    witness, value = _best_point(scored)
    return SupResult(value, witness, Method.ENUMERATION, len(members), candidates=_ranked(scored))


def _union_sup(model: StatModel, x: Sample, region: Union, cfg: OptConfig) -> SupResult:
    parts = [restricted_sup(model, x, member, cfg) for member in region.members]
    best = parts[0]
    for part in parts[1:]:
        if part.witness is None:
            continue
        if best.witness is None or kernels.better(
            (part.sup_loglik, part.witness.coords), (best.sup_loglik, best.witness.coords)
        ):
            best = part
    scored = [c for part in parts for c in part.candidates]
    return SupResult(
        best.sup_loglik,
        best.witness,
        best.method,
        sum(p.evaluations for p in parts),
        converged=all(p.converged for p in parts),
        feasible=any(p.feasible for p in parts),
        candidates=_ranked(scored),
    )


# Continuous search


class _Problem:
    """A region search expressed in the free coordinates of the parameter space."""

    def __init__(self, model: StatModel, x: Sample, region: Region, cfg: OptConfig) -> None:
        self.model = model
        self.x = x
        self.region = region
        self.cfg = cfg
        self.space = model.space
        self.evaluations = 0
        self._lock = threading.Lock()

    def loglik(self, free: np.ndarray) -> np.ndarray:
        free = np.atleast_2d(free)
        with self._lock:
            self.evaluations += free.shape[0]
        return self.model.loglik_many(self.space.to_full(free), self.x)

    def loglik_at(self, t: float, base: np.ndarray, axis: int) -> float:
        point = base.copy()
        point[axis] = t
        return float(self.loglik(point[None, :])[0])

    def member(self, free: np.ndarray, tol: float = perf.MEMBERSHIP_TOL) -> np.ndarray:
        full = self.space.to_full(np.atleast_2d(free))
        return self.region.contains_coords(full, Mode.CLOSURE, tol)

    def violation(self, free: np.ndarray) -> np.ndarray:
        return self.region.violation(self.space.to_full(np.atleast_2d(free)))

    def point(self, free: Sequence[float]) -> ParamPoint:
        return ParamPoint.from_array(self.space.to_full(np.asarray(free, dtype=float)[None, :])[0])

    def search_box(self) -> Tuple[Tuple[Interval, ...], bool]:
        """A finite search box; unbounded directions are closed by bracket expansion."""
        if self.space.chart is None:
            bounds = self.region.bounding_box(self.space.bounds)
        else:
            bounds = self.space.search_bounds
        if any(b.lower > b.upper for b in bounds):
            return bounds, False
        anchor = self._anchor(bounds)
        settled = True
        finite = []
        for axis, interval in enumerate(bounds):
            lower, upper = interval.lower, interval.upper
            if math.isinf(upper):
                upper, evaluations, ok = kernels.expand_bound(
                    lambda t: self.loglik_at(t, anchor, axis), anchor[axis], 1.0, upper
                )
                settled &= ok
            if math.isinf(lower):
                lower, evaluations, ok = kernels.expand_bound(
                    lambda t: self.loglik_at(t, anchor, axis), anchor[axis], -1.0, lower
                )
                settled &= ok
            finite.append(Interval(lower, upper, interval.lower_open, interval.upper_open))
        return self._widen(tuple(finite), bounds), settled

    def _widen(
        self, box: Tuple[Interval, ...], bounds: Sequence[Interval]
    ) -> Tuple[Interval, ...]:
        """Double the unbounded sides of ``box`` until a coarse probe meets the region."""
        for _ in range(perf.BRACKET_MAX_EXPANSIONS):
            probe = kernels.mesh(kernels.grid_axes(box, perf.PROBE_POINTS))
            if self.member(probe).any():
                return box
            widened = []
            for interval, original in zip(box, bounds):
                width = max(interval.upper - interval.lower, 1.0)
                lower, upper = interval.lower, interval.upper
                if math.isinf(original.upper):
                    upper += width
                if math.isinf(original.lower):
                    lower -= width
                widened.append(interval._replace(lower=lower, upper=upper))
            if tuple(widened) == box:
                return box
            box = tuple(widened)
            logger.debug("Widened the search box to %s", box)
        return box

    def _anchor(self, bounds: Sequence[Interval]) -> np.ndarray:
        mle = self.model.global_mle(self.x)
        if mle:
            anchor = self.space.to_free(mle[0].as_array()[None, :])[0].astype(float)
        else:
            anchor = np.array([_default_coordinate(b) for b in self.space.search_bounds])
        for axis, interval in enumerate(bounds):
            if not interval.contains(anchor[axis], Mode.CLOSURE):
                anchor[axis] = _default_coordinate(interval)
        return anchor


def _default_coordinate(interval: Interval) -> float:
    if interval.is_bounded:
        return 0.5 * (interval.lower + interval.upper)
    if math.isfinite(interval.lower):
        return interval.lower + 1.0
    if math.isfinite(interval.upper):
        return interval.upper - 1.0
    return 0.0


def _numeric_sup(model: StatModel, x: Sample, region: Region, cfg: OptConfig) -> SupResult:
    problem = _Problem(model, x, region, cfg)
    bounds, settled = problem.search_box()
    if any(b.lower > b.upper for b in bounds):
        return SupResult(-math.inf, None, Method.GRID_REFINE, problem.evaluations, feasible=False)
    optima: List[Optimum] = []
    method = Method.GOLDEN_SECTION
    if len(bounds) == 1 and model.space.chart is None:
        optima = _golden_search(problem, bounds[0])
    if not optima:
        method, optima = _grid_search(problem, bounds)
    best = kernels.best_optimum(optima)
    if best is None or best.value == -math.inf:
        logger.warning("No feasible point with positive likelihood found in %s", describe(region))
        return SupResult(
            -math.inf,
            None,
            method,
            problem.evaluations,
            converged=False,
            feasible=best is not None,
        )
    candidates = _ranked([(problem.point(o.coords), o.value) for o in optima])
    converged = settled and best.converged
    if not converged:
        logger.warning("Search over %s did not converge", describe(region))
    logger.debug(
        "sup over %s: %s at %s (%s, %s evaluations)",
        describe(region),
        best.value,
        best.coords,
        method.value,
        problem.evaluations,
    )
    return SupResult(
        best.value,
        problem.point(best.coords),
        method,
        problem.evaluations,
        converged=converged,
        candidates=candidates,
    )


def _golden_search(problem: _Problem, interval: Interval) -> List[Optimum]:
    cfg = problem.cfg
    grid = np.linspace(interval.lower, interval.upper, cfg.grid_points(1))
    values = kernels.evaluate_grid(problem.loglik, grid[:, None], cfg.threads)
    kernels.check_overflow(values)
    mask = problem.member(grid[:, None])

    def inside(t: float) -> bool:
        return bool(problem.member(np.array([[t]]))[0])

    def f(t: float) -> float:
        return float(problem.loglik(np.array([[t]]))[0])

    optima = []
    for start, stop in kernels.feasible_runs(mask):
        left, right = grid[start], grid[stop]
        if start > 0:
            left = kernels.bisect_boundary(inside, grid[start], grid[start - 1])
        if stop < len(grid) - 1:
            right = kernels.bisect_boundary(inside, grid[stop], grid[stop + 1])
        optima.append(Optimum((left,), f(left), 1))
        optima.append(Optimum((right,), f(right), 1))
        run_values = values[start : stop + 1]
        for i in kernels.local_maxima(run_values)[: cfg.multistarts]:
            lower = left if i == 0 else grid[start + i - 1]
            upper = right if i == len(run_values) - 1 else grid[start + i + 1]
            if upper > lower:
                optima.append(kernels.golden_section_max(f, lower, upper, cfg.rel_tol))
    return optima


def _top_cells(coords: np.ndarray, scores: np.ndarray, count: int) -> List[np.ndarray]:
    order = np.lexsort(tuple(coords[:, i] for i in reversed(range(coords.shape[1]))) + (-scores,))
    return [coords[i] for i in order[:count] if scores[i] > -math.inf]


def _grid_search(problem: _Problem, bounds: Sequence[Interval]) -> Tuple[Method, List[Optimum]]:
    cfg = problem.cfg
    points = cfg.grid_points(len(bounds))
    coords = kernels.mesh(kernels.grid_axes(bounds, points))
    values = kernels.evaluate_grid(problem.loglik, coords, cfg.threads)
    kernels.check_overflow(values)
    mask = problem.member(coords)
    optima: List[Optimum] = []
    starts = _top_cells(coords, np.where(mask, values, -math.inf), cfg.multistarts)
    if starts:
        method = Method.GRID_REFINE
        refined = _refine(problem, bounds, starts[0], points)
        if refined is not None:
            optima.append(refined)
    else:
        # No grid member has positive likelihood: thin regions such as equality curves.
        method = Method.SIMPLEX_MULTISTART
        starts = _penalty_starts(problem, bounds, coords, values)
    optima += _polish(problem, bounds, starts)
    return method, optima


def _penalty_starts(
    problem: _Problem, bounds: Sequence[Interval], coords: np.ndarray, values: np.ndarray
) -> List[np.ndarray]:
    cfg = problem.cfg
    with np.errstate(invalid="ignore", over="ignore"):
        scores = values - perf.PENALTY_WEIGHT * problem.violation(coords) ** 2
    scores = np.where(np.isnan(scores), -math.inf, scores)
    starts = _top_cells(coords, scores, cfg.multistarts)
    rng = cfg.rng()
    lower = np.array([b.lower for b in bounds])
    upper = np.array([b.upper for b in bounds])
    return starts + list(rng.uniform(lower, upper, size=(cfg.multistarts, len(bounds))))


def _refine(
    problem: _Problem, bounds: Sequence[Interval], center: np.ndarray, points: int
) -> Optional[Optimum]:
    """Zoom the grid around the best feasible cell for a few rounds."""
    cfg = problem.cfg
    widths = np.array([(b.upper - b.lower) / (points - 1) for b in bounds])
    best = None
    for _ in range(cfg.refine_rounds + 1):
        box = [
            b.intersect(Interval(c - 2 * w, c + 2 * w)) for b, c, w in zip(bounds, center, widths)
        ]
        coords = kernels.mesh(kernels.grid_axes(box, points))
        values = kernels.evaluate_grid(problem.loglik, coords, cfg.threads)
        scores = np.where(problem.member(coords), values, -math.inf)
        cells = _top_cells(coords, scores, 1)
        if not cells:
            break
        center = cells[0]
        value = float(problem.loglik(center[None, :])[0])
        if best is None or kernels.better((value, tuple(center)), (best.value, best.coords)):
            best = Optimum(tuple(float(c) for c in center), value, points ** len(bounds))
        widths = np.array([(b.upper - b.lower) / (points - 1) for b in box])
    return best


def _polish(
    problem: _Problem, bounds: Sequence[Interval], starts: Sequence[np.ndarray]
) -> List[Optimum]:
    cfg = problem.cfg

    def run(start: np.ndarray) -> Optional[Optimum]:
        found = kernels.nelder_mead_polish(
            problem.loglik, problem.violation, np.asarray(start, dtype=float), bounds, cfg.rel_tol
        )
        coords, feasible = kernels.repair(problem.violation, np.array(found.coords), bounds)
        if not feasible or not problem.member(coords, perf.WITNESS_TOL)[0]:
            logger.debug("Discarding infeasible polish result %s", found.coords)
            return None
        value = float(problem.loglik(coords[None, :])[0])
        return Optimum(tuple(float(c) for c in coords), value, found.evaluations, found.converged)

    if cfg.threads > 1 and len(starts) > 1:
        with ThreadPoolExecutor(cfg.threads) as executor:
            results = list(executor.map(run, starts))
    else:
        results = [run(s) for s in starts]
    return [r for r in results if r is not None]
