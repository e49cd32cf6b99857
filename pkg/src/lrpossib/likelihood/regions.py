"""Region trees: describable subsets of a parameter space.

Every node answers three questions for the optimizer and the evidence engine:

* ``contains_coords`` - vectorized membership of coordinate rows, under a boundary ``Mode``;
* ``violation`` - a nonnegative distance-like measure that is zero on the closure of the node
  (or of its complement when ``negate`` is set), used as a penalty;
* ``bounding_box`` - a box that contains the node, used to narrow searches.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from lrpossib.likelihood import perf
from lrpossib.likelihood.types import (
    InputError,
    Interval,
    Mode,
    ParamPoint,
    ParamSpace,
    RegionError,
    Relation,
)

logger = logging.getLogger(__name__)


def hwe_constraint(coords: np.ndarray) -> np.ndarray:
    """``√θ₁ + √θ₃``, which equals one on the Hardy-Weinberg curve."""
    coords = np.asarray(coords, dtype=float)
    return np.sqrt(np.clip(coords[..., 0], 0, None)) + np.sqrt(np.clip(coords[..., 2], 0, None))


#: Constraint functions addressable by name from JSON documents
CONSTRAINT_FUNCTIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "hwe": hwe_constraint,
}


class Region:
    name: Optional[str]
    #: Declared Lebesgue dimension, used to classify hypotheses as sharp or non-sharp
    dim: Optional[int]
    #: Named region family for model closed forms
    family: Optional[str] = None

    def contains_coords(
        self, coords: np.ndarray, mode: Mode = Mode.EXACT, tol: float = perf.MEMBERSHIP_TOL
    ) -> np.ndarray:
        raise NotImplementedError

    def contains(
        self, point: ParamPoint, mode: Mode = Mode.EXACT, tol: float = perf.MEMBERSHIP_TOL
    ) -> bool:
        return bool(self.contains_coords(point.as_array()[None, :], mode, tol)[0])

    def violation(self, coords: np.ndarray, negate: bool = False) -> np.ndarray:
        raise NotImplementedError

    def bounding_box(self, bounds: Sequence[Interval]) -> Tuple[Interval, ...]:
        return tuple(bounds)

    def validate(self, space: ParamSpace) -> None:
        if self.dim is not None and self.dim < 0:
            raise RegionError(f"Declared dimension must be nonnegative, got {self.dim}.")

    @property
    def children(self) -> Tuple["Region", ...]:
        return ()

    def __or__(self, other: "Region") -> "Union":
        return Union((self, other))

    def __and__(self, other: "Region") -> "Intersection":
        return Intersection((self, other))

    def __invert__(self) -> "Complement":
        return Complement(self)


def _rows(coords: np.ndarray) -> np.ndarray:
    return np.atleast_2d(np.asarray(coords, dtype=float))


@dataclass(frozen=True, eq=False)
class Full(Region):
    name: Optional[str] = None
    dim: Optional[int] = None

    def contains_coords(self, coords, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        return np.ones(_rows(coords).shape[0], dtype=bool)

    def contains(self, point, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        return True

    def violation(self, coords, negate=False):
        return np.full(_rows(coords).shape[0], math.inf if negate else 0.0)


@dataclass(frozen=True, eq=False)
class Empty(Region):
    name: Optional[str] = None
    dim: Optional[int] = None

    def contains_coords(self, coords, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        return np.zeros(_rows(coords).shape[0], dtype=bool)

    def contains(self, point, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        return False

    def violation(self, coords, negate=False):
        return np.full(_rows(coords).shape[0], 0.0 if negate else math.inf)


@dataclass(frozen=True, eq=False)
class FiniteSet(Region):
    points: Tuple[ParamPoint, ...]
    name: Optional[str] = None
    dim: Optional[int] = 0

    @classmethod
    def of_indices(cls, *indices: int, name: Optional[str] = None) -> "FiniteSet":
        return cls(tuple(ParamPoint((), int(i)) for i in indices), name=name)

    @classmethod
    def of_values(cls, *values: Sequence[float], name: Optional[str] = None) -> "FiniteSet":
        return cls(tuple(ParamPoint.of(*np.atleast_1d(v)) for v in values), name=name)

    def _coords(self) -> np.ndarray:
        return np.array([p.coords for p in self.points if p.coords], dtype=float)

    def contains_coords(self, coords, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        coords = _rows(coords)
        if mode is Mode.INTERIOR:
            return np.zeros(coords.shape[0], dtype=bool)
        members = self._coords()
        if members.size == 0:
            return np.zeros(coords.shape[0], dtype=bool)
        diff = np.abs(coords[:, None, :] - members[None, :, :]).max(axis=-1)
        return (diff <= tol).any(axis=1)

    def contains(self, point, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        if point.index is not None:
            for member in self.points:
                if member.index is not None:
                    if member.index == point.index:
                        return True
                elif point.coords and np.allclose(member.coords, point.coords, rtol=0, atol=tol):
                    return True
            # Finite spaces carry the discrete topology, so boundaries do not apply
            return False
        return super().contains(point, mode, tol)

    def violation(self, coords, negate=False):
        coords = _rows(coords)
        if negate:
            return np.zeros(coords.shape[0])
        members = self._coords()
        if members.size == 0:
            return np.full(coords.shape[0], math.inf)
        dist = np.linalg.norm(coords[:, None, :] - members[None, :, :], axis=-1)
        return dist.min(axis=1)

    def bounding_box(self, bounds):
        members = self._coords()
        if members.size == 0:
            return tuple(bounds)
        return tuple(
            Interval(float(lo), float(hi)) for lo, hi in zip(members.min(0), members.max(0))
        )

    def validate(self, space):
        super().validate(space)
        for point in self.points:
            if point.index is not None:
                if not space.is_finite or not 0 <= point.index < len(space.points):
                    raise RegionError(f"Index {point.index} does not name a parameter value.")
            elif len(point.coords) != space.ambient_dim:
                raise RegionError(
                    f"Point {point} has {len(point.coords)} coordinates; "
                    f"the parameter space has {space.ambient_dim}."
                )


@dataclass(frozen=True, eq=False)
class Box(Region):
    intervals: Tuple[Interval, ...]
    name: Optional[str] = None
    dim: Optional[int] = None

    @classmethod
    def closed(cls, *pairs: Tuple[float, float], name: Optional[str] = None) -> "Box":
        return cls(tuple(Interval(lo, hi) for lo, hi in pairs), name=name)

    def contains_coords(self, coords, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        coords = _rows(coords)
        if coords.shape[1] != len(self.intervals):
            raise RegionError(
                f"Box has {len(self.intervals)} intervals but points have {coords.shape[1]} "
                "coordinates."
            )
        inside = np.ones(coords.shape[0], dtype=bool)
        for i, interval in enumerate(self.intervals):
            inside &= interval.contains(coords[:, i], mode, tol)
        return inside

    def violation(self, coords, negate=False):
        coords = _rows(coords)
        lower = np.array([iv.lower for iv in self.intervals])
        upper = np.array([iv.upper for iv in self.intervals])
        if negate:
            depth = np.minimum(coords - lower, upper - coords)
            return np.clip(depth.min(axis=1), 0, None)
        below = np.clip(lower - coords, 0, None)
        above = np.clip(coords - upper, 0, None)
        return np.sqrt((below ** 2 + above ** 2).sum(axis=1))

    def bounding_box(self, bounds):
        return tuple(b.intersect(iv) for b, iv in zip(bounds, self.intervals))

    def validate(self, space):
        super().validate(space)
        if len(self.intervals) != space.ambient_dim:
            raise RegionError(
                f"Box has {len(self.intervals)} intervals; "
                f"the parameter space has {space.ambient_dim} coordinates."
            )
        for interval in self.intervals:
            if interval.lower > interval.upper:
                raise RegionError(f"Interval {tuple(interval)} has lower > upper.")


@dataclass(frozen=True, eq=False)
class Constraint(Region):
    """``g(θ) <relation> rhs`` for a vectorized function ``g``."""

    g: Callable[[np.ndarray], np.ndarray]
    relation: Relation
    rhs: float
    name: Optional[str] = None
    dim: Optional[int] = None
    family: Optional[str] = None
    #: Number of coordinates ``g`` expects, when known
    arity: Optional[int] = None

    @classmethod
    def linear(
        cls, coefficients: Sequence[float], relation: Relation, rhs: float, **kwargs
    ) -> "Constraint":
        a = np.asarray(coefficients, dtype=float)
        return cls(lambda coords: _rows(coords) @ a, relation, rhs, arity=len(a), **kwargs)

    @classmethod
    def named(cls, function: str, relation: Relation, rhs: float, **kwargs) -> "Constraint":
        try:
            g = CONSTRAINT_FUNCTIONS[function]
        except KeyError:
            raise RegionError(
                f"Unknown constraint function {function!r}; "
                f"expected one of {sorted(CONSTRAINT_FUNCTIONS)}."
            )
        return cls(g, relation, rhs, **kwargs)

    def evaluate(self, coords: np.ndarray) -> np.ndarray:
        with np.errstate(invalid="ignore"):
            values = np.asarray(self.g(_rows(coords)), dtype=float).reshape(-1)
        return values

    def contains_coords(self, coords, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        gap = self.evaluate(coords) - self.rhs
        rel = self.relation
        with np.errstate(invalid="ignore"):
            if mode is Mode.INTERIOR:
                if rel is Relation.EQ:
                    return np.zeros(gap.shape, dtype=bool)
                if rel in (Relation.LT, Relation.LE):
                    return gap < -tol
                return gap > tol
            if rel is Relation.EQ:
                return np.abs(gap) <= tol
            strict = mode is Mode.EXACT and rel in (Relation.LT, Relation.GT)
            if rel in (Relation.LT, Relation.LE):
                return gap < 0 if strict else gap <= tol
            return gap > 0 if strict else gap >= -tol

    def violation(self, coords, negate=False):
        gap = self.evaluate(coords) - self.rhs
        rel = self.relation
        if rel is Relation.EQ:
            out = np.zeros_like(gap) if negate else np.abs(gap)
        else:
            upper = rel in (Relation.LT, Relation.LE)
            if negate:
                upper = not upper
            out = np.clip(gap, 0, None) if upper else np.clip(-gap, 0, None)
        return np.where(np.isfinite(out), out, 1.0)

    def validate(self, space):
        super().validate(space)
        if self.arity is not None and self.arity != space.ambient_dim:
            raise RegionError(
                f"Constraint expects {self.arity} coordinates; "
                f"the parameter space has {space.ambient_dim}."
            )


@dataclass(frozen=True, eq=False)
class Predicate(Region):
    """Opaque membership test; gives the optimizer no geometry to work with."""

    test: Callable[[ParamPoint], bool]
    name: Optional[str] = None
    dim: Optional[int] = None

    def contains_coords(self, coords, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        return np.array([bool(self.test(ParamPoint.from_array(row))) for row in _rows(coords)])

    def contains(self, point, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        return bool(self.test(point))

    def violation(self, coords, negate=False):
        inside = self.contains_coords(coords)
        return np.where(inside != negate, 0.0, 1.0)


def _child_mode(mode: Mode) -> Mode:
    if mode is Mode.CLOSURE:
        return Mode.INTERIOR
    if mode is Mode.INTERIOR:
        return Mode.CLOSURE
    return Mode.EXACT


@dataclass(frozen=True, eq=False)
class Complement(Region):
    """Complement relative to the parameter space."""

    child: Region
    name: Optional[str] = None
    dim: Optional[int] = None

    def contains_coords(self, coords, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        return ~self.child.contains_coords(coords, _child_mode(mode), tol)

    def contains(self, point, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        return not self.child.contains(point, _child_mode(mode), tol)

    def violation(self, coords, negate=False):
        return self.child.violation(coords, not negate)

    def validate(self, space):
        super().validate(space)
        self.child.validate(space)

    @property
    def children(self):
        return (self.child,)


@dataclass(frozen=True, eq=False)
class Union(Region):
    members: Tuple[Region, ...]
    name: Optional[str] = None
    dim: Optional[int] = None

    def contains_coords(self, coords, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        inside = np.zeros(_rows(coords).shape[0], dtype=bool)
        for member in self.members:
            inside |= member.contains_coords(coords, mode, tol)
        return inside

    def contains(self, point, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        return any(member.contains(point, mode, tol) for member in self.members)

    def violation(self, coords, negate=False):
        if not self.members:
            return Empty().violation(coords, negate)
        parts = np.stack([m.violation(coords, negate) for m in self.members])
        return parts.sum(axis=0) if negate else parts.min(axis=0)

    def bounding_box(self, bounds):
        if not self.members:
            return tuple(bounds)
        boxes = [m.bounding_box(bounds) for m in self.members]
        hull = boxes[0]
        for box in boxes[1:]:
            hull = tuple(a.hull(b) for a, b in zip(hull, box))
        return tuple(b.intersect(h) for b, h in zip(bounds, hull))

    def validate(self, space):
        super().validate(space)
        for member in self.members:
            member.validate(space)

    @property
    def children(self):
        return self.members


@dataclass(frozen=True, eq=False)
class Intersection(Region):
    members: Tuple[Region, ...]
    name: Optional[str] = None
    dim: Optional[int] = None

    def contains_coords(self, coords, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        inside = np.ones(_rows(coords).shape[0], dtype=bool)
        for member in self.members:
            inside &= member.contains_coords(coords, mode, tol)
        return inside

    def contains(self, point, mode=Mode.EXACT, tol=perf.MEMBERSHIP_TOL):
        return all(member.contains(point, mode, tol) for member in self.members)

    def violation(self, coords, negate=False):
        if not self.members:
            return Full().violation(coords, negate)
        parts = np.stack([m.violation(coords, negate) for m in self.members])
        return parts.min(axis=0) if negate else parts.sum(axis=0)

    def bounding_box(self, bounds):
        box = tuple(bounds)
        for member in self.members:
            box = tuple(a.intersect(b) for a, b in zip(box, member.bounding_box(bounds)))
        return box

    def validate(self, space):
        super().validate(space)
        for member in self.members:
            member.validate(space)

    @property
    def children(self):
        return self.members


def region_membership(
    region: Region, theta: ParamPoint, space: Optional[ParamSpace] = None
) -> bool:
    """Whether ``theta`` belongs to ``region``, with set algebra relative to ``space``."""
    if space is not None:
        if not space.contains(theta):
            raise InputError(f"Parameter point {theta} does not belong to the parameter space.")
        region.validate(space)
        if space.is_finite:
            theta = space.locate(theta)
    return region.contains(theta, Mode.EXACT)


def describe(region: Region) -> str:
    if region.name:
        return region.name
    kind = type(region).__name__
    if region.children:
        return f"{kind}({', '.join(describe(c) for c in region.children)})"
    return kind


def simplify(region: Region) -> Region:
    """Fold trivial set algebra (double complements, ``Full``/``Empty`` operands)."""
    if isinstance(region, Complement):
        child = simplify(region.child)
        if isinstance(child, Full):
            return Empty(region.name, region.dim)
        if isinstance(child, Empty):
            return Full(region.name, region.dim)
        if isinstance(child, Complement):
            return child.child
        return Complement(child, region.name, region.dim)
    if isinstance(region, (Union, Intersection)):
        members = tuple(simplify(m) for m in region.members)
        absorbing, neutral = (Full, Empty) if isinstance(region, Union) else (Empty, Full)
        if any(isinstance(m, absorbing) for m in members):
            return absorbing(region.name, region.dim)
        members = tuple(m for m in members if not isinstance(m, neutral))
        if not members:
            return neutral(region.name, region.dim)
        if len(members) == 1:
            return members[0]
        return type(region)(members, region.name, region.dim)
    return region


def relative_to(region: Region, space: ParamSpace) -> Region:
    """Open box sides that reach the edge of ``space``.

    Interiors and closures are then taken in the topology of the parameter space: ``[0, 3]``
    in ``(0, ∞)`` has interior ``[0, 3)``, so the closure of its complement is ``[3, ∞)``.
    """
    if space.is_finite:
        return region
    if isinstance(region, Box) and len(region.intervals) == len(space.bounds):
        intervals = []
        for interval, bound in zip(region.intervals, space.bounds):
            if interval.lower <= bound.lower:
                interval = interval._replace(lower=-math.inf, lower_open=True)
            if interval.upper >= bound.upper:
                interval = interval._replace(upper=math.inf, upper_open=True)
            intervals.append(interval)
        return Box(tuple(intervals), region.name, region.dim)
    if isinstance(region, Complement):
        return Complement(relative_to(region.child, space), region.name, region.dim)
    if isinstance(region, (Union, Intersection)):
        members = tuple(relative_to(m, space) for m in region.members)
        return type(region)(members, region.name, region.dim)
    return region
