import math

import numpy as np
import pytest

from lrpossib import likelihood as lk
from lrpossib.likelihood.types import Interval, Mode, ParamPoint, Relation


@pytest.fixture
def unit():
    return lk.BinomialModel(8).space


def test_box_boundary_modes():
    box = lk.Box((Interval(0.4, 0.6, lower_open=True),))
    edge = ParamPoint.of(0.4)
    assert not box.contains(edge, Mode.EXACT)
    assert box.contains(edge, Mode.CLOSURE)
    assert not box.contains(edge, Mode.INTERIOR)
    assert box.contains(ParamPoint.of(0.6), Mode.EXACT)


def test_complement_flips_boundary_mode():
    box = lk.Box.closed((0.4, 0.6))
    complement = lk.Complement(box)
    assert not complement.contains(ParamPoint.of(0.4), Mode.EXACT)
    assert complement.contains(ParamPoint.of(0.4), Mode.CLOSURE)
    assert complement.contains(ParamPoint.of(0.7))


def test_set_operators(unit):
    low = lk.Box.closed((0.0, 0.3))
    high = lk.Box.closed((0.7, 1.0))
    middle = ~(low | high)
    assert lk.region_membership(middle, ParamPoint.of(0.5), unit)
    assert not lk.region_membership(middle, ParamPoint.of(0.2), unit)
    both = low & lk.Box.closed((0.2, 0.5))
    assert lk.region_membership(both, ParamPoint.of(0.25), unit)
    assert not lk.region_membership(both, ParamPoint.of(0.4), unit)


def test_region_membership_outside_space(unit):
    with pytest.raises(lk.InputError):
        lk.region_membership(lk.Full(), ParamPoint.of(1.5), unit)


def test_box_arity_is_checked(unit):
    with pytest.raises(lk.RegionError):
        lk.Box.closed((0.0, 1.0), (0.0, 1.0)).validate(unit)


def test_unknown_constraint_function():
    with pytest.raises(lk.RegionError):
        lk.Constraint.named("nope", Relation.LE, 1.0)


def test_linear_constraint():
    region = lk.Constraint.linear([1.0, -1.0], Relation.LE, 0.0)
    coords = np.array([[0.1, 0.2], [0.3, 0.2], [0.2, 0.2]])
    assert region.contains_coords(coords).tolist() == [True, False, True]
    assert region.contains_coords(coords, Mode.INTERIOR).tolist() == [True, False, False]
    assert region.violation(coords)[1] == pytest.approx(0.1)


@pytest.mark.parametrize(
    "theta, expected",
    [
        ((0.25, 0.5, 0.25), "theta1"),
        ((0.4, 0.2, 0.4), "theta3"),
        ((0.1, 0.8, 0.1), "theta2"),
    ],
)
def test_hwe_region_membership(theta, expected):
    space = lk.TrinomialModel().space
    found = [
        region.name
        for region in lk.hwe_regions()
        if lk.region_membership(region, ParamPoint.of(*theta), space)
    ]
    assert found == [expected]


def test_finite_set_by_index():
    model = lk.FraserModel(20)
    region = lk.FiniteSet.of_indices(2, name="three")
    point = model.space.points[2]
    assert lk.region_membership(region, point, model.space)
    assert not lk.region_membership(region, model.space.points[3], model.space)
    with pytest.raises(lk.RegionError):
        lk.FiniteSet.of_indices(99).validate(model.space)


def test_finite_set_has_no_interior():
    region = lk.FiniteSet.of_values(0.5)
    assert region.contains(ParamPoint.of(0.5))
    assert not region.contains(ParamPoint.of(0.5), Mode.INTERIOR)


def test_simplify():
    box = lk.Box.closed((0.0, 0.5))
    assert lk.simplify(lk.Complement(lk.Complement(box))) is box
    assert isinstance(lk.simplify(lk.Complement(lk.Full())), lk.Empty)
    assert isinstance(lk.simplify(lk.Union((box, lk.Full()))), lk.Full)
    assert lk.simplify(lk.Union((box, lk.Empty()))) is box
    assert isinstance(lk.simplify(lk.Intersection((box, lk.Empty()))), lk.Empty)


def test_describe():
    box = lk.Box.closed((0.0, 0.5), name="low")
    assert lk.describe(box) == "low"
    assert lk.describe(lk.Complement(box)) == "Complement(low)"


def test_bounding_box():
    bounds = (Interval(0.0, math.inf, True, True),)
    box = lk.Box.closed((1.0, 3.0))
    assert box.bounding_box(bounds)[0][:2] == (1.0, 3.0)
    union = lk.Union((box, lk.Box.closed((5.0, 6.0))))
    assert union.bounding_box(bounds)[0][:2] == (1.0, 6.0)


def test_relative_to_opens_sides_on_the_space_edge():
    space = lk.PoissonModel().space
    box = lk.relative_to(lk.Box.closed((0.0, 3.0)), space)
    assert box.intervals[0].lower == -math.inf
    assert box.intervals[0].upper == 3.0
    complement = lk.Complement(box)
    assert not complement.contains(ParamPoint.of(0.0), Mode.CLOSURE)
    assert complement.contains(ParamPoint.of(3.0), Mode.CLOSURE)
    inner = lk.Box.closed((1.0, 3.0))
    assert lk.relative_to(inner, space).intervals == inner.intervals
