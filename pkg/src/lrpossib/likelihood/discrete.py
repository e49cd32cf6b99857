"""Discrete counter-example models with three-point supports.

Both parameter spaces are the positive integers; they are capped at ``theta_max``, which holds
every parameter value with positive likelihood as long as ``theta_max >= 2x + 1``.
"""
import logging
import math
from abc import abstractmethod
from fractions import Fraction
from typing import Dict, Optional

import numpy as np

from lrpossib.likelihood.models import StatModel, _check_count
from lrpossib.likelihood.types import InputError, ParamPoint, ParamSpace, Sample

logger = logging.getLogger(__name__)

THIRD = Fraction(1, 3)


class ThreePointModel(StatModel):
    name = "three-point"
    #: Smallest observable outcome
    min_x = 0

    def __init__(self, theta_max: int) -> None:
        if theta_max < 1:
            raise InputError(f"theta_max must be at least 1, got {theta_max}.")
        self.theta_max = int(theta_max)
        thetas = range(1, self.theta_max + 1)
        super().__init__(ParamSpace.finite([str(t) for t in thetas], [(t,) for t in thetas]))

    @classmethod
    def for_observation(cls, x: int, theta_max: Optional[int] = None):
        return cls(theta_max if theta_max is not None else 10 * int(x) + 1)

    @staticmethod
    @abstractmethod
    def support(theta: int) -> Dict[int, Fraction]:
        """``{x: P_θ(X = x)}`` over the outcomes with positive probability."""

    def pmf(self, theta: int, x: int) -> Fraction:
        return self.support(theta).get(x, Fraction(0))

    def check_sample(self, x):
        value = _check_count(x.value)
        if value < self.min_x:
            raise InputError(f"x={value} is outside the sample space; expected x >= {self.min_x}.")
        if self.theta_max < 2 * value + 1:
            logger.warning(
                "theta_max=%s drops parameter values with positive likelihood at x=%s",
                self.theta_max,
                value,
            )

    def loglik(self, theta, x):
        point = self.space.locate(theta)
        prob = self.pmf(int(point.coords[0]), int(x.value))
        return math.log(prob) if prob > 0 else -math.inf

    def loglik_coords(self, coords, x):
        return np.array([self.loglik(ParamPoint.from_array(c), x) for c in coords])

    def candidates(self, x: int) -> Dict[int, Fraction]:
        """Parameter values with positive likelihood at ``x``, with that likelihood."""
        found = {}
        for theta in (x // 2, 2 * x - 1, 2 * x, 2 * x + 1):
            if 1 <= theta <= self.theta_max:
                prob = self.pmf(theta, x)
                if prob > 0:
                    found[theta] = prob
        return dict(sorted(found.items()))

    def nu_exact(self, x: int) -> Dict[int, Fraction]:
        """Exact ν_x({θ}) for every θ with positive likelihood; all other values are 0."""
        self.check_sample(Sample.of(x))
        probs = self.candidates(int(x))
        if not probs:
            return {}
        best = max(probs.values())
        return {theta: prob / best for theta, prob in probs.items()}


class FraserModel(ThreePointModel):
    """P_θ puts 1/3 on each of ⌊θ/2⌋, 2θ and 2θ + 1."""

    name = "fraser"

    @staticmethod
    def support(theta):
        return {theta // 2: THIRD, 2 * theta: THIRD, 2 * theta + 1: THIRD}


class SeveriniModel(ThreePointModel):
    """Like the Fraser model, but odd θ > 1 shift weight towards (θ − 1)/2."""

    name = "severini"
    min_x = 1

    @staticmethod
    def support(theta):
        if theta == 1 or theta % 2 == 0:
            return {-(-theta // 2): THIRD, 2 * theta: THIRD, 2 * theta + 1: THIRD}
        return {
            (theta - 1) // 2: Fraction(10, 24),
            2 * theta: Fraction(7, 24),
            2 * theta + 1: Fraction(7, 24),
        }


def fraser_coverage(theta: int) -> Fraction:
    """P_θ(⌊X/2⌋ = θ) by enumeration of the support."""
    if theta < 1:
        raise InputError(f"theta={theta} must be a positive integer.")
    support = FraserModel.support(theta)
    return sum((p for x, p in support.items() if x // 2 == theta), Fraction(0))


def severini_T(x: int) -> int:
    if x < 1:
        raise InputError(f"x={x} must be a positive integer.")
    if x % 2 == 1 and x > 1:
        return (x - 1) // 2
    return -(-x // 2)


def severini_coverage(theta: int, stat: str = "T") -> Fraction:
    """P_θ(stat(X) = θ) for ``stat`` in ``{"T", "2x+1"}``, by enumeration of the support."""
    if theta < 1:
        raise InputError(f"theta={theta} must be a positive integer.")
    statistics = {"T": severini_T, "2x+1": lambda x: 2 * x + 1}
    try:
        statistic = statistics[stat]
    except KeyError:
        raise InputError(f"Unknown statistic {stat!r}; expected one of {sorted(statistics)}.")
    support = SeveriniModel.support(theta)
    return sum((p for x, p in support.items() if x >= 1 and statistic(x) == theta), Fraction(0))
