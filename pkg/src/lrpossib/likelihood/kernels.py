"""Derivative-free numerical building blocks for the supremum engine."""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from lrpossib.likelihood import perf
from lrpossib.likelihood.types import Interval, SampleError, SampleStatus

logger = logging.getLogger(__name__)

PHI_RATIO = 2 / (1 + math.sqrt(5))

#: Vectorized objective over coordinate rows
VectorFn = Callable[[np.ndarray], np.ndarray]


class Optimum(NamedTuple):
    coords: Tuple[float, ...]
    value: float
    evaluations: int
    converged: bool = True


def better(candidate: Tuple[float, Sequence[float]], incumbent: Tuple[float, Sequence[float]]):
    """Larger value wins; equal values go to the lexicographically smaller coordinates."""
    value, coords = candidate
    best_value, best_coords = incumbent
    if value > best_value:
        return True
    return value == best_value and tuple(coords) < tuple(best_coords)


def best_optimum(optima: Sequence[Optimum]) -> Optional[Optimum]:
    best = None
    for optimum in optima:
        if best is None or better((optimum.value, optimum.coords), (best.value, best.coords)):
            best = optimum
    return best


def check_overflow(values: np.ndarray) -> None:
    peak = np.max(values) if np.size(values) else -math.inf
    if peak > perf.LOGLIK_CAP:
        raise SampleError(
            SampleStatus.NOT_IN_XSTAR,
            f"The log-likelihood exceeds {perf.LOGLIK_CAP:g}; the likelihood is unbounded.",
        )


def evaluate_grid(fn: VectorFn, coords: np.ndarray, threads: int = 1) -> np.ndarray:
    """Evaluate ``fn`` on the rows of ``coords``, chunked over a thread pool.

    Chunks are gathered in submission order, so the output does not depend on ``threads``.
    """
    if threads <= 1 or coords.shape[0] < 2 * threads:
        return np.asarray(fn(coords), dtype=float)
    chunks = np.array_split(coords, threads)
    with ThreadPoolExecutor(threads) as executor:
        parts = list(executor.map(fn, chunks))
    return np.concatenate([np.asarray(p, dtype=float) for p in parts])


def golden_section_max(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    tol: float = perf.DEFAULT_REL_TOL,
    max_iterations: int = perf.GOLDEN_MAX_ITERATIONS,
) -> Optimum:
    """Maximize a unimodal ``f`` on ``[lower, upper]``; endpoints are candidates too."""
    x_lo, x_hi = lower, upper
    x1 = x_hi - PHI_RATIO * (x_hi - x_lo)
    x2 = x_lo + PHI_RATIO * (x_hi - x_lo)
    f1, f2 = f(x1), f(x2)
    f_lower, f_upper = f(lower), f(upper)
    evaluations = 4
    iteration = 0
    x_tol = tol * max(1.0, abs(lower), abs(upper))
    while iteration < max_iterations and abs(x_hi - x_lo) > x_tol:
        if f2 > f1:
            x_lo, x1, f1 = x1, x2, f2
            x2 = x_lo + PHI_RATIO * (x_hi - x_lo)
            f2 = f(x2)
        else:
            x_hi, x2, f2 = x2, x1, f1
            x1 = x_hi - PHI_RATIO * (x_hi - x_lo)
            f1 = f(x1)
        evaluations += 1
        iteration += 1
    x_mid = 0.5 * (x_lo + x_hi)
    f_mid = f(x_mid)
    evaluations += 1
    converged = iteration < max_iterations and not (math.isnan(f1) or math.isnan(f2))
    best = Optimum((x_mid,), f_mid, evaluations, converged)
    for x, fx in ((lower, f_lower), (upper, f_upper), (x1, f1), (x2, f2)):
        if better((fx, (x,)), (best.value, best.coords)):
            best = Optimum((x,), fx, evaluations, converged)
    return best


def expand_bound(
    f: Callable[[float], float], start: float, direction: float, limit: float
) -> Tuple[float, int, bool]:
    """Walk from ``start`` until ``f`` decreases on several consecutive geometric steps.

    Returns the far end of the bracket, the evaluation count and whether the walk settled.
    """
    step = max(1.0, abs(start))
    previous = f(start)
    evaluations = 1
    decreases = 0
    position = start
    for k in range(perf.BRACKET_MAX_EXPANSIONS):
        candidate = start + direction * step * (2.0 ** k)
        if (direction > 0 and candidate >= limit) or (direction < 0 and candidate <= limit):
            return limit, evaluations, True
        value = f(candidate)
        evaluations += 1
        if value > perf.LOGLIK_CAP:
            raise SampleError(
                SampleStatus.NOT_IN_XSTAR,
                f"The log-likelihood diverges along an unbounded direction (reached {value:g}).",
            )
        decreases = decreases + 1 if value < previous else 0
        previous = value
        position = candidate
        logger.debug("bracket expansion %s: %s -> %s", k, candidate, value)
        if decreases >= perf.BRACKET_DECREASES:
            return position, evaluations, True
    logger.warning("Bracket expansion did not settle; stopping at %s.", position)
    return position, evaluations, False


def bisect_boundary(
    inside: Callable[[float], bool],
    a_in: float,
    b_out: float,
    iterations: int = perf.BISECTION_ITERATIONS,
) -> float:
    """Locate a membership boundary between a member ``a_in`` and a non-member ``b_out``."""
    for _ in range(iterations):
        middle = 0.5 * (a_in + b_out)
        if middle in (a_in, b_out):
            break
        if inside(middle):
            a_in = middle
        else:
            b_out = middle
    return a_in


def feasible_runs(mask: np.ndarray) -> List[Tuple[int, int]]:
    """Index ranges ``[start, stop]`` of consecutive ``True`` entries."""
    runs = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def local_maxima(values: np.ndarray) -> List[int]:
    """Indices of the plateau-start local maxima of a 1-D array, best first."""
    n = len(values)
    found = []
    for i in range(n):
        left = values[i - 1] if i > 0 else -math.inf
        right = values[i + 1] if i < n - 1 else -math.inf
        if values[i] > left and values[i] >= right and values[i] > -math.inf:
            found.append(i)
    return sorted(found, key=lambda i: (-values[i], i))


def grid_axes(bounds: Sequence[Interval], points: int) -> List[np.ndarray]:
    return [np.linspace(b.lower, b.upper, points) for b in bounds]


def mesh(axes: Sequence[np.ndarray]) -> np.ndarray:
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.reshape(-1) for g in grids], axis=1)


def project(coords: np.ndarray, bounds: Sequence[Interval]) -> np.ndarray:
    lower = np.array([b.lower for b in bounds])
    upper = np.array([b.upper for b in bounds])
    return np.clip(coords, lower, upper)


def nelder_mead_polish(
    objective: VectorFn,
    violation: VectorFn,
    start: np.ndarray,
    bounds: Sequence[Interval],
    rel_tol: float,
    max_iterations: int = perf.SIMPLEX_MAX_ITERATIONS,
) -> Optimum:
    """Maximize ``objective - PENALTY_WEIGHT * violation**2`` with box projection."""
    evaluations = 0

    def negative(free: np.ndarray) -> float:
        nonlocal evaluations
        evaluations += 1
        point = project(free, bounds)[None, :]
        value = float(objective(point)[0])
        penalty = perf.PENALTY_WEIGHT * float(violation(point)[0]) ** 2
        if not math.isfinite(value) or not math.isfinite(penalty):
            return perf.INFEASIBLE_OBJECTIVE
        return -(value - penalty)

    widths = np.array([b.upper - b.lower for b in bounds])
    scale = np.where(np.isfinite(widths), widths, 1.0)
    simplex = [start]
    for i in range(len(start)):
        vertex = start.copy()
        step = 0.05 * scale[i]
        vertex[i] = vertex[i] + step if vertex[i] + step <= bounds[i].upper else vertex[i] - step
        simplex.append(vertex)
    result = minimize(
        negative,
        start,
        method="Nelder-Mead",
        options={
            "initial_simplex": np.array(simplex),
            "xatol": rel_tol * float(np.max(scale)),
            "fatol": rel_tol,
            "maxiter": max_iterations,
            "maxfev": 2 * max_iterations,
        },
    )
    coords = project(result.x, bounds)
    return Optimum(tuple(float(c) for c in coords), -float(result.fun), evaluations, result.success)


def repair(
    violation: VectorFn,
    coords: np.ndarray,
    bounds: Sequence[Interval],
    tol: float = perf.WITNESS_TOL,
    max_iterations: int = perf.REPAIR_MAX_ITERATIONS,
) -> Tuple[np.ndarray, bool]:
    """Gauss-Newton steps on the violation until the point is feasible within ``tol``."""
    point = project(np.asarray(coords, dtype=float), bounds)
    for _ in range(max_iterations):
        current = float(violation(point[None, :])[0])
        if current <= tol:
            return point, True
        grad = np.empty_like(point)
        h = 1e-7 * np.maximum(1.0, np.abs(point))
        for i in range(len(point)):
            shifted = point.copy()
            shifted[i] -= h[i]
            grad[i] = (current - float(violation(shifted[None, :])[0])) / h[i]
        norm = float(grad @ grad)
        if not math.isfinite(norm) or norm == 0:
            break
        point = project(point - current * grad / norm, bounds)
    return point, float(violation(point[None, :])[0]) <= tol
