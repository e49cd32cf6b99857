"""Level sets Λ_α(x) = {θ: λ(θ, x) >= α} on plot grids, with marching-squares boundaries."""
import logging
import math
from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np

from lrpossib.likelihood import kernels, perf
from lrpossib.likelihood.models import StatModel
from lrpossib.likelihood.optimize import DEFAULT_CONFIG, checked_global_sup, mle_set
from lrpossib.likelihood.types import (
    ContourResult,
    GridSpec,
    InputError,
    OptConfig,
    Sample,
    UnsupportedError,
)

logger = logging.getLogger(__name__)

#: Floor of the plotted log λ, relative to log α
LOG_FLOOR = 50.0
COARSE_POINTS = 64

Point = Tuple[float, ...]


def contour(
    model: StatModel,
    x: Sample,
    alpha: float,
    grid: GridSpec = GridSpec(),
    cfg: OptConfig = DEFAULT_CONFIG,
) -> ContourResult:
    space = model.space
    if space.is_finite:
        raise UnsupportedError("Contours need a continuous parameter space.")
    axes_idx = space.plot_axes
    if space.dim > 2 or len(axes_idx) > 2:
        raise UnsupportedError(f"Contours support at most 2 dimensions, got {space.dim}.")
    if not 0 < alpha <= 1:
        raise InputError(f"alpha={alpha} is outside (0, 1].")
    if grid.resolution < 3:
        raise InputError(f"Grid resolution must be at least 3, got {grid.resolution}.")
    reference = checked_global_sup(model, x, cfg)
    names = tuple(
        space.axis_names[i] if i < len(space.axis_names) else f"theta{i + 1}" for i in axes_idx
    )
    log_alpha = math.log(alpha)

    def log_lambda(display: np.ndarray) -> np.ndarray:
        full = space.complete(display)
        values = model.loglik_many(full, x) - reference.sup_loglik
        return np.maximum(values, log_alpha - LOG_FLOOR)

    if grid.bounds is not None:
        if len(grid.bounds) != len(axes_idx):
            raise InputError(f"Grid bounds need {len(axes_idx)} (lower, upper) pairs.")
        bounds = [(float(lo), float(hi)) for lo, hi in grid.bounds]
    else:
        center = reference.witness.as_array()[list(axes_idx)]
        bounds = _default_bounds(space, axes_idx, center, log_lambda, log_alpha, cfg)
    axes = tuple(np.linspace(lo, hi, grid.resolution) for lo, hi in bounds)
    coords = kernels.mesh(axes)
    values = kernels.evaluate_grid(log_lambda, coords, cfg.threads)
    shape = tuple(len(a) for a in axes)
    field = values.reshape(shape)
    inside = field >= log_alpha

    mle: Tuple = ()
    if alpha >= 1 - perf.ONE_TOL:
        mle = tuple(mle_set(model, x, cfg))
        logger.info("alpha = 1: the level set is the maximum likelihood set %s", mle)
    if len(axes) == 1:
        crossings = _crossings_1d(axes[0], field - log_alpha)
        segments: Tuple = ()
        polylines = tuple((p,) for p in crossings)
    else:
        segments = tuple(_marching_squares(axes[0], axes[1], field - log_alpha))
        polylines = tuple(_chain(segments))
    logger.info(
        "Contour at alpha=%.6g: %s of %s grid points inside, %s polylines",
        alpha,
        int(inside.sum()),
        inside.size,
        len(polylines),
    )
    return ContourResult(alpha, names, axes, field, inside, segments, polylines, mle)


def _default_bounds(
    space, axes_idx, center, log_lambda, log_alpha, cfg
) -> List[Tuple[float, float]]:
    """A box around the level set: slice walks from the MLE, then a coarse-grid tightening."""
    target = log_alpha - 5.0
    box = []
    for k, axis in enumerate(axes_idx):
        interval = space.bounds[axis]
        lower, upper = interval.lower, interval.upper
        ends = []
        for direction, limit in ((-1.0, lower), (1.0, upper)):
            if math.isfinite(limit):
                ends.append(limit)
                continue
            ends.append(_walk(log_lambda, center, k, direction, target))
        lo, hi = ends
        width = hi - lo
        if not math.isfinite(lower):
            lo -= width
        if not math.isfinite(upper):
            hi += width
        box.append((lo, hi))
    axes = [np.linspace(lo, hi, COARSE_POINTS) for lo, hi in box]
    coords = kernels.mesh(axes)
    values = kernels.evaluate_grid(log_lambda, coords, cfg.threads)
    near = coords[values >= log_alpha - 1.0]
    if near.shape[0] == 0:
        return box
    tightened = []
    for k, axis in enumerate(axes_idx):
        step = (box[k][1] - box[k][0]) / (COARSE_POINTS - 1)
        interval = space.bounds[axis]
        lo = max(near[:, k].min() - 2 * step, interval.lower)
        hi = min(near[:, k].max() + 2 * step, interval.upper)
        tightened.append((lo, hi))
    return tightened


def _walk(log_lambda, center: np.ndarray, k: int, direction: float, target: float) -> float:
    step = 0.01 * max(1.0, abs(center[k]))
    point = center.astype(float).copy()
    for _ in range(perf.BRACKET_MAX_EXPANSIONS):
        point[k] = center[k] + direction * step
        if log_lambda(point[None, :])[0] < target:
            break
        step *= 2
    return float(point[k])


def _crossings_1d(axis: np.ndarray, field: np.ndarray) -> List[Point]:
    found = []
    for i in range(len(axis) - 1):
        v0, v1 = field[i], field[i + 1]
        if (v0 >= 0) != (v1 >= 0):
            found.append((_lerp(axis[i], axis[i + 1], v0, v1),))
    return found


def _lerp(p0: float, p1: float, v0: float, v1: float) -> float:
    t = v0 / (v0 - v1) if v0 != v1 else 0.5
    t = min(max(t, 0.0), 1.0)
    return p0 * (1 - t) + t * p1


def _marching_squares(
    xs: np.ndarray, ys: np.ndarray, field: np.ndarray
) -> List[Tuple[Point, Point]]:
    """Boundary segments of ``{field >= 0}``, one or two per mixed cell."""
    above = field >= 0
    corners = np.stack([above[:-1, :-1], above[1:, :-1], above[1:, 1:], above[:-1, 1:]])
    mixed = corners.any(axis=0) & ~corners.all(axis=0)
    segments: List[Tuple[Point, Point]] = []

    def crossing(a: Tuple[int, int], b: Tuple[int, int]) -> Point:
        va, vb = field[a], field[b]
        return (_lerp(xs[a[0]], xs[b[0]], va, vb), _lerp(ys[a[1]], ys[b[1]], va, vb))

    for i, j in zip(*np.nonzero(mixed)):
        cell = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)]
        states = [bool(above[c]) for c in cell]
        edges = [(c, (c + 1) % 4) for c in range(4) if states[c] != states[(c + 1) % 4]]
        if len(edges) == 2:
            (a0, a1), (b0, b1) = edges
            segments.append((crossing(cell[a0], cell[a1]), crossing(cell[b0], cell[b1])))
            continue
        # Saddle: cut off the corners that disagree with the cell center
        center_state = float(np.mean([field[c] for c in cell])) >= 0
        for c in range(4):
            if states[c] != center_state:
                before, after = (c - 1) % 4, (c + 1) % 4
                segments.append(
                    (crossing(cell[before], cell[c]), crossing(cell[c], cell[after]))
                )
    return segments


def _chain(segments: Sequence[Tuple[Point, Point]]) -> List[Tuple[Point, ...]]:
    """Join segments that share an endpoint into polylines."""
    key = lambda p: (round(p[0], 12), round(p[1], 12))  # noqa: E731
    touching: Dict[Tuple[float, float], List[int]] = defaultdict(list)
    for n, (a, b) in enumerate(segments):
        touching[key(a)].append(n)
        touching[key(b)].append(n)
    used = [False] * len(segments)
    lines = []
    for n in range(len(segments)):
        if used[n]:
            continue
        used[n] = True
        line = list(segments[n])
        for forward in (True, False):
            while True:
                tip = line[-1] if forward else line[0]
                nxt = next((m for m in touching[key(tip)] if not used[m]), None)
                if nxt is None:
                    break
                used[nxt] = True
                a, b = segments[nxt]
                other = b if key(a) == key(tip) else a
                if forward:
                    line.append(other)
                else:
                    line.insert(0, other)
        lines.append(tuple(line))
    return lines
