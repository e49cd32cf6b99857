import logging
import math
from abc import ABC, abstractmethod
from typing import Callable, Dict, Hashable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

from lrpossib.likelihood import perf
from lrpossib.likelihood.types import (
    Chart,
    InputError,
    Interval,
    LinearEquality,
    ParamPoint,
    ParamSpace,
    Sample,
    SampleError,
    SampleStatus,
)

logger = logging.getLogger(__name__)

#: Restricted maximizer for one region family: sample -> arg sup over the family's region
ClosedForm = Callable[[Sample], ParamPoint]


class StatModel(ABC):
    """A log-likelihood evaluator together with its parameter space.

    Implementations are immutable and safe to evaluate from several threads at once.
    """

    name: str = "model"

    def __init__(
        self, space: ParamSpace, closed_form: Optional[Mapping[str, ClosedForm]] = None
    ) -> None:
        self.space = space
        self.closed_form: Dict[str, ClosedForm] = dict(closed_form or {})

    @abstractmethod
    def loglik_coords(self, coords: np.ndarray, x: Sample) -> np.ndarray:
        """Log-likelihood of each row of ``coords``; ``-inf`` where the likelihood is zero."""

    def loglik_many(self, coords: np.ndarray, x: Sample) -> np.ndarray:
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            values = np.asarray(self.loglik_coords(coords, x), dtype=float)
        return np.where(np.isnan(values), -math.inf, values)

    def loglik(self, theta: ParamPoint, x: Sample) -> float:
        if self.space.is_finite:
            theta = self.space.locate(theta)
        return float(self.loglik_many(theta.as_array()[None, :], x)[0])

    def global_mle(self, x: Sample) -> Optional[List[ParamPoint]]:
        """Closed-form maximum likelihood estimates, or ``None`` when not available."""
        return None

    def check_sample(self, x: Sample) -> None:
        """Raise ``InputError`` when ``x`` lies outside the sample space."""

    def pointwise_lambda(self, theta: ParamPoint, x: Sample) -> float:
        """λ(θ, x) against the closed-form MLE."""
        self.check_sample(x)
        theta = self.space.check_point(theta)
        mle = self.global_mle(x)
        if not mle:
            raise InputError(f"Model {self.name!r} does not declare a closed-form MLE.")
        log_ratio = self.loglik(theta, x) - self.loglik(mle[0], x)
        return math.exp(min(log_ratio, 0.0)) if log_ratio > -math.inf else 0.0

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"


def _check_count(value, upper: Optional[int] = None, what: str = "x") -> int:
    if isinstance(value, bool) or not float(value).is_integer():
        raise InputError(f"{what}={value!r} is outside the sample space: expected an integer.")
    count = int(value)
    if count < 0 or (upper is not None and count > upper):
        bounds = f"{{0, ..., {upper}}}" if upper is not None else "{0, 1, ...}"
        raise InputError(f"{what}={count} is outside the sample space {bounds}.")
    return count


# Binomial


class BinomialModel(StatModel):
    name = "binomial"

    def __init__(self, n: int, thetas: Optional[Sequence[float]] = None) -> None:
        if n < 1:
            raise InputError(f"Binomial n must be at least 1, got {n}.")
        self.n = int(n)
        if thetas is None:
            space = ParamSpace.continuous([Interval(0.0, 1.0, True, True)], axis_names=("theta",))
        else:
            if not all(0 < t < 1 for t in thetas):
                raise InputError(f"Binomial parameter values must lie in (0, 1), got {thetas}.")
            space = ParamSpace.finite([f"{t:g}" for t in thetas], [(t,) for t in thetas])
            self.name = "binomial-finite"
        super().__init__(space)

    def check_sample(self, x):
        _check_count(x.value, self.n)

    def loglik_coords(self, coords, x):
        k = float(x.value)
        theta = coords[:, 0]
        log_comb = gammaln(self.n + 1) - gammaln(k + 1) - gammaln(self.n - k + 1)
        values = xlogy(k, theta) + xlog1py(self.n - k, -theta) + log_comb
        return np.where((theta < 0) | (theta > 1), -math.inf, values)

    def global_mle(self, x):
        if self.space.is_finite:
            return None
        return [ParamPoint.of(float(x.value) / self.n)]


def binom_nu(theta: float, x: int, n: int) -> float:
    """λ(θ, x) for the Binomial(n, θ) model."""
    if not 0 < theta < 1:
        raise InputError(f"theta={theta} is outside (0, 1).")
    model = BinomialModel(n)
    return model.pointwise_lambda(ParamPoint.of(theta), Sample.of(x))


# Poisson


class PoissonModel(StatModel):
    name = "poisson"

    def __init__(self) -> None:
        super().__init__(
            ParamSpace.continuous([Interval(0.0, math.inf, True, True)], axis_names=("theta",))
        )

    def check_sample(self, x):
        _check_count(x.value)

    def loglik_coords(self, coords, x):
        k = float(x.value)
        theta = coords[:, 0]
        values = -theta + xlogy(k, theta) - gammaln(k + 1)
        return np.where(theta < 0, -math.inf, values)

    def global_mle(self, x):
        return [ParamPoint.of(float(x.value))]


def poisson_nu(theta: float, x: int) -> float:
    """λ(θ, x) for the Poisson(θ) model."""
    if not theta > 0:
        raise InputError(f"theta={theta} must be positive.")
    return PoissonModel().pointwise_lambda(ParamPoint.of(theta), Sample.of(x))


# Normal


class NormalModel(StatModel):
    """Normal(μ, σ²) with known sample size, consuming the sufficient statistics ``(m, s²)``.

    ``s²`` is the sample variance with denominator ``n``.
    """

    name = "normal"

    def __init__(self, n: int) -> None:
        if n < 1:
            raise InputError(f"Normal sample size must be at least 1, got {n}.")
        self.n = int(n)
        super().__init__(
            ParamSpace.continuous(
                [Interval(), Interval(0.0, math.inf, True, True)], axis_names=("mu", "sigma2")
            )
        )

    @staticmethod
    def summarize(data: Sequence[float]) -> Sample:
        values = np.asarray(data, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise InputError("Normal data must be a non-empty vector of reals.")
        return Sample.of(float(values.mean()), float(values.var()), n=int(values.size))

    def check_sample(self, x):
        if len(x.data) != 2:
            raise InputError(f"Normal samples are (mean, variance) pairs, got {x.data}.")
        mean, var = x.data
        if not (math.isfinite(mean) and math.isfinite(var)) or var < 0:
            raise InputError(f"Normal sufficient statistics {x.data} are outside the sample space.")
        if x.meta.get("n", self.n) != self.n:
            raise InputError(f"Sample size {x.meta['n']} does not match the model's n={self.n}.")

    def loglik_coords(self, coords, x):
        mean, var = x.data
        mu, sigma2 = coords[:, 0], coords[:, 1]
        half_n = self.n / 2
        values = -half_n * np.log(2 * math.pi * sigma2) - half_n * (var + (mean - mu) ** 2) / sigma2
        return np.where(sigma2 > 0, values, -math.inf)

    def global_mle(self, x):
        mean, var = x.data
        if var <= 0:
            raise SampleError(
                SampleStatus.NOT_IN_XSTAR,
                "A zero sample variance makes the Normal likelihood unbounded.",
            )
        return [ParamPoint.of(mean, var)]


def normal_nu(mu: float, sigma2: float, m_x: float, s2_x: float, n: int) -> float:
    """λ((μ, σ²), x) for the Normal model, with exponent n/2 on the variance ratio."""
    if not sigma2 > 0 or not s2_x > 0 or n < 1:
        raise InputError("normal_nu requires sigma2 > 0, s2_x > 0 and n >= 1.")
    log_ratio = (n / 2) * math.log(s2_x / sigma2) - n / (2 * sigma2) * (
        s2_x + (m_x - mu) ** 2
    ) + n / 2
    return math.exp(min(log_ratio, 0.0))


# Trinomial


def hwe_side(counts: Sequence[int]) -> int:
    """Sign of √θ̂₃ − (1 − √θ̂₁) at the MLE, decided in exact integer arithmetic.

    √y₁ + √y₃ ≷ √m  ⇔  2√(y₁y₃) ≷ y₂  ⇔  4y₁y₃ ≷ y₂².
    """
    y1, y2, y3 = (int(c) for c in counts)
    gap = 4 * y1 * y3 - y2 * y2
    return (gap > 0) - (gap < 0)


def equilibrium_point(counts: Sequence[int]) -> ParamPoint:
    """Maximizer of the trinomial likelihood on the Hardy-Weinberg curve."""
    y1, y2, y3 = (int(c) for c in counts)
    m = y1 + y2 + y3
    p = (m + y1 - y3) / (2 * m)
    theta1, theta3 = p * p, (1 - p) * (1 - p)
    return ParamPoint.of(theta1, 1 - theta1 - theta3, theta3)


def _simplex_to_full(free: np.ndarray) -> np.ndarray:
    free = np.atleast_2d(free)
    u, v = free[:, 0], free[:, 1]
    theta3 = (1 - u) * v
    return np.stack([u, 1 - u - theta3, theta3], axis=1)


def _simplex_to_free(full: np.ndarray) -> np.ndarray:
    full = np.atleast_2d(full)
    u = full[:, 0]
    rest = 1 - u
    v = np.divide(full[:, 2], rest, out=np.zeros_like(rest), where=rest > 0)
    return np.stack([u, np.clip(v, 0, 1)], axis=1)


class TrinomialModel(StatModel):
    """Genotype counts ``(y₁, y₂, y₃)`` on the simplex θ₁ + θ₂ + θ₃ = 1."""

    name = "trinomial"

    def __init__(self) -> None:
        space = ParamSpace.continuous(
            [Interval(0.0, 1.0)] * 3,
            equalities=(LinearEquality((1.0, 1.0, 1.0), 1.0),),
            chart=Chart(
                bounds=(Interval(0.0, 1.0), Interval(0.0, 1.0)),
                to_full=_simplex_to_full,
                to_free=_simplex_to_free,
            ),
            display_axes=(0, 2),
            axis_names=("theta1", "theta2", "theta3"),
        )
        super().__init__(
            space,
            closed_form={
                "hwe_equilibrium": self._equilibrium_sup,
                "hwe_inbreeding": self._inbreeding_sup,
                "hwe_outbreeding": self._outbreeding_sup,
            },
        )

    @staticmethod
    def counts(x: Sample) -> Tuple[int, int, int]:
        if len(x.data) != 3:
            raise InputError(f"Trinomial samples are count triples, got {x.data}.")
        y1, y2, y3 = (_check_count(c, what="y") for c in x.data)
        return y1, y2, y3

    def check_sample(self, x):
        if sum(self.counts(x)) < 1:
            raise InputError("Trinomial counts must sum to at least 1.")

    def loglik_coords(self, coords, x):
        y = np.asarray(self.counts(x), dtype=float)
        m = y.sum()
        log_coef = gammaln(m + 1) - gammaln(y + 1).sum()
        outside = (coords < -perf.MEMBERSHIP_TOL).any(axis=1) | (
            np.abs(coords.sum(axis=1) - 1) > 1e-9
        )
        theta = np.clip(coords, 0, 1)
        values = xlogy(y[None, :], theta).sum(axis=1) + log_coef
        return np.where(outside, -math.inf, values)

    def global_mle(self, x):
        y = np.asarray(self.counts(x), dtype=float)
        return [ParamPoint.from_array(y / y.sum())]

    def _equilibrium_sup(self, x: Sample) -> ParamPoint:
        return equilibrium_point(self.counts(x))

    def _inbreeding_sup(self, x: Sample) -> ParamPoint:
        if hwe_side(self.counts(x)) <= 0:
            return self.global_mle(x)[0]
        return equilibrium_point(self.counts(x))

    def _outbreeding_sup(self, x: Sample) -> ParamPoint:
        if hwe_side(self.counts(x)) >= 0:
            return self.global_mle(x)[0]
        return equilibrium_point(self.counts(x))


# Finite


class FiniteModel(StatModel):
    """Likelihood table over a finite space: ``table[outcome][j] = P_θⱼ(X = outcome)``."""

    name = "finite"

    def __init__(
        self,
        labels: Sequence[str],
        table: Mapping[Hashable, Sequence[float]],
        coords: Optional[Sequence[Sequence[float]]] = None,
    ) -> None:
        if coords is None:
            coords = [(float(i),) for i in range(len(labels))]
        super().__init__(ParamSpace.finite(labels, coords))
        self.table: Dict[Hashable, np.ndarray] = {}
        for outcome, row in table.items():
            probs = np.asarray(row, dtype=float)
            if probs.shape != (len(labels),):
                raise InputError(f"Likelihood row for {outcome!r} needs {len(labels)} values.")
            if not np.all(np.isfinite(probs)) or np.any(probs < 0):
                raise InputError(f"Likelihood row for {outcome!r} must be finite and nonnegative.")
            self.table[self._key(outcome)] = probs

    @staticmethod
    def _key(outcome: Hashable) -> Hashable:
        return str(outcome)

    def check_sample(self, x):
        if self._key(x.value) not in self.table:
            raise InputError(f"Outcome {x.value!r} is not in the likelihood table.")

    def row(self, x: Sample) -> np.ndarray:
        self.check_sample(x)
        return self.table[self._key(x.value)]

    def loglik(self, theta, x):
        index = self.space.locate(theta).index
        with np.errstate(divide="ignore"):
            return float(np.log(self.row(x)[index]))

    def loglik_coords(self, coords, x):
        with np.errstate(divide="ignore"):
            logs = np.log(self.row(x))
        return np.array([logs[self.space.locate(ParamPoint.from_array(c)).index] for c in coords])
