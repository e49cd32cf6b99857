"""Hardy-Weinberg equilibrium as a sharp hypothesis on the trinomial simplex.

The equilibrium curve is ``√θ₁ + √θ₃ = 1``. The two open sides of the curve are
``√θ₁ + √θ₃ < 1`` (Θ₂, inbreeding) and ``√θ₁ + √θ₃ > 1`` (Θ₃, outbreeding). On the curve
the likelihood is a function of ``p = √θ₁`` alone,

    f(p) ∝ p^(2y₁ + y₂) (1 - p)^(y₂ + 2y₃),

maximized at ``p̃ = (m + y₁ - y₃) / (2m)``. The log-likelihood is concave on the simplex, so
the supremum over the side that does not hold the MLE is attained on the curve.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from scipy.special import xlogy

from lrpossib.likelihood.contour import contour
from lrpossib.likelihood.models import TrinomialModel, equilibrium_point, hwe_side
from lrpossib.likelihood.optimize import DEFAULT_CONFIG
from lrpossib.likelihood.regions import Constraint
from lrpossib.likelihood.types import (
    GridSpec,
    HweCase,
    HweFigureRow,
    HweReport,
    HweSample,
    InputError,
    OptConfig,
    ParamPoint,
    Relation,
)

logger = logging.getLogger(__name__)

MODEL = TrinomialModel()


def hwe_sample(y1: int, y2: int, y3: int) -> HweSample:
    counts = []
    for label, value in (("y1", y1), ("y2", y2), ("y3", y3)):
        if isinstance(value, bool) or not float(value).is_integer() or value < 0:
            raise InputError(f"{label}={value!r} must be a nonnegative integer count.")
        counts.append(int(value))
    sample = HweSample(*counts)
    if sample.m < 1:
        raise InputError("Genotype counts must sum to at least 1.")
    return sample


def parse_counts(text: str) -> HweSample:
    """``"y1,y2,y3"`` -> ``HweSample``."""
    parts = [p.strip() for p in str(text).split(",")]
    if len(parts) != 3:
        raise InputError(f"Expected three comma-separated counts, got {text!r}.")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise InputError(f"Counts must be integers, got {text!r}.")
    return hwe_sample(*values)


def hwe_regions() -> Tuple[Constraint, Constraint, Constraint]:
    """Θ₁ (equilibrium curve), Θ₂ (inbreeding side) and Θ₃ (outbreeding side)."""
    theta1 = Constraint.named(
        "hwe", Relation.EQ, 1.0, name="theta1", dim=1, family="hwe_equilibrium", arity=3
    )
    theta2 = Constraint.named(
        "hwe", Relation.LT, 1.0, name="theta2", dim=2, family="hwe_inbreeding", arity=3
    )
    theta3 = Constraint.named(
        "hwe", Relation.GT, 1.0, name="theta3", dim=2, family="hwe_outbreeding", arity=3
    )
    return theta1, theta2, theta3


def _mle(sample: HweSample) -> ParamPoint:
    m = sample.m
    return ParamPoint.of(sample.y1 / m, sample.y2 / m, sample.y3 / m)


def _log_ratio(sample: HweSample, theta: ParamPoint, mle: ParamPoint) -> float:
    y = np.asarray(sample, dtype=float)
    value = float(np.sum(xlogy(y, theta.as_array())) - np.sum(xlogy(y, mle.as_array())))
    return min(value, 0.0)


def hwe_curve_sup(sample: HweSample) -> Tuple[ParamPoint, float]:
    """The maximizer θ̃ of the likelihood on the equilibrium curve and ν(Θ₁) = λ(θ̃, x)."""
    sample = hwe_sample(*sample)
    tilde = equilibrium_point(sample)
    log_nu1 = _log_ratio(sample, tilde, _mle(sample))
    return tilde, math.exp(log_nu1)


def hwe_report(sample: HweSample) -> HweReport:
    sample = hwe_sample(*sample)
    mle = _mle(sample)
    tilde = equilibrium_point(sample)
    log_nu1 = _log_ratio(sample, tilde, mle)
    nu1 = math.exp(log_nu1)
    side = hwe_side(sample)
    if side < 0:
        case, nu2, nu3 = HweCase.MLE_IN_INBREEDING, 1.0, nu1
    elif side > 0:
        case, nu2, nu3 = HweCase.MLE_IN_OUTBREEDING, nu1, 1.0
    else:
        case, nu1, nu2, nu3, log_nu1 = HweCase.MLE_ON_CURVE, 1.0, 1.0, 1.0, 0.0
    logger.info(
        "HWE %s: %s, nu = (%.6g, %.6g, %.6g)", tuple(sample), case.value, nu1, nu2, nu3
    )
    return HweReport(sample, nu1, nu2, nu3, mle, case, tilde, log_nu1)


def hwe_figure_data(
    samples: Iterable[HweSample],
    cfg: OptConfig = DEFAULT_CONFIG,
    grid: GridSpec = GridSpec(),
) -> List[HweFigureRow]:
    """One row per sample, with the boundary of the level set at α = ν(Θ₁) for plotting."""
    samples = [hwe_sample(*s) for s in samples]
    inner = replace(cfg, threads=1)

    def row(sample: HweSample) -> HweFigureRow:
        report = hwe_report(sample)
        if report.nu1 <= 0:
            return HweFigureRow(report, ())
        result = contour(MODEL, sample.as_sample(), report.nu1, grid, inner)
        return HweFigureRow(report, result.polylines)

    if cfg.threads > 1 and len(samples) > 1:
        with ThreadPoolExecutor(min(cfg.threads, len(samples))) as executor:
            return list(executor.map(row, samples))
    return [row(s) for s in samples]


def hwe_sample_grid(m: int, samples: Sequence[Tuple[int, int]] = ()) -> List[HweSample]:
    """Every count triple with total ``m``, or only the given ``(y₁, y₃)`` pairs."""
    if m < 1:
        raise InputError(f"The sample size m must be at least 1, got {m}.")
    if samples:
        return [hwe_sample(y1, m - y1 - y3, y3) for y1, y3 in samples]
    return [hwe_sample(y1, m - y1 - y3, y3) for y1 in range(m + 1) for y3 in range(m + 1 - y1)]
