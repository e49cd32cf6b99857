"""Algebraic properties of the likelihood-ratio measure on random finite models."""
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from lrpossib import likelihood as lk
from lrpossib.likelihood.types import Sample

CFG = lk.OptConfig(threads=1)
FINITE_CASES = settings(deadline=None, max_examples=1000)
CONTINUOUS_CASES = settings(deadline=None, max_examples=100)
OBSERVED = Sample.of("obs")

_prob = st.floats(min_value=0.0, max_value=1.0, allow_nan=False, allow_infinity=False)


@st.composite
def finite_models(draw, min_size=2, max_size=6):
    size = draw(st.integers(min_value=min_size, max_value=max_size))
    row = draw(st.lists(_prob, min_size=size, max_size=size))
    assume(max(row) > 1e-300)
    labels = [f"t{i}" for i in range(size)]
    return lk.FiniteModel(labels, {"obs": row}), np.asarray(row)


@st.composite
def models_and_subsets(draw):
    model, row = draw(finite_models())
    size = len(row)
    first = draw(st.lists(st.booleans(), min_size=size, max_size=size))
    second = draw(st.lists(st.booleans(), min_size=size, max_size=size))
    return model, row, first, second


def subset(mask):
    return lk.FiniteSet.of_indices(*[i for i, keep in enumerate(mask) if keep])


def nu_of(model, region):
    return lk.nu(model, OBSERVED, region, CFG).nu


@FINITE_CASES
@given(finite_models())
def test_full_and_empty_are_normalized(args):
    model, _ = args
    assert nu_of(model, lk.Full()) == 1.0
    assert nu_of(model, lk.Empty()) == 0.0


@FINITE_CASES
@given(models_and_subsets())
def test_nu_is_the_largest_pointwise_ratio(args):
    model, row, mask, _ = args
    expected = max((row[i] for i, keep in enumerate(mask) if keep), default=0.0) / row.max()
    assert nu_of(model, subset(mask)) == pytest.approx(expected, rel=1e-12, abs=1e-300)


@FINITE_CASES
@given(models_and_subsets())
def test_nu_is_monotone(args):
    model, _, mask, extra = args
    larger = [a or b for a, b in zip(mask, extra)]
    assert nu_of(model, subset(mask)) <= nu_of(model, subset(larger))


@FINITE_CASES
@given(models_and_subsets())
def test_union_is_the_maximum(args):
    model, _, first, second = args
    a, b = subset(first), subset(second)
    assert nu_of(model, lk.Union((a, b))) == max(nu_of(model, a), nu_of(model, b))


@FINITE_CASES
@given(models_and_subsets())
def test_region_or_complement_is_fully_possible(args):
    model, _, mask, _ = args
    region = subset(mask)
    assert max(nu_of(model, region), nu_of(model, lk.Complement(region))) == 1.0


@st.composite
def priors(draw, size):
    weights = np.asarray(
        draw(
            st.lists(
                st.floats(min_value=0.01, max_value=1.0), min_size=size, max_size=size
            )
        )
    )
    return lk.FinitePrior(tuple(float(w) for w in weights / weights.sum()))


@FINITE_CASES
@given(models_and_subsets(), st.data())
def test_posterior_bound(args, data):
    model, _, mask, _ = args
    assume(any(mask))
    prior = data.draw(priors(len(mask)))
    check = lk.lemma2_check(model, OBSERVED, prior, subset(mask), CFG)
    assert check.holds


@FINITE_CASES
@given(models_and_subsets(), st.data())
def test_posterior_never_exceeds_possibility_when_applicable(args, data):
    model, _, mask, _ = args
    prior = data.draw(priors(len(mask)))
    check = lk.corollary1_check(model, OBSERVED, prior, subset(mask), CFG)
    assert check.holds is (True if check.applicable else None)


@FINITE_CASES
@given(models_and_subsets(), st.data())
def test_impossible_regions_are_improbable(args, data):
    model, row, _, _ = args
    prior = data.draw(priors(len(row)))
    zeros = [value == 0 for value in row]
    check = lk.impossibility_check(model, OBSERVED, prior, subset(zeros), CFG)
    assert check.holds
    if any(zeros):
        assert check.nu == 0.0 and check.post_prob == 0.0


@CONTINUOUS_CASES
@given(
    st.integers(min_value=0, max_value=8),
    st.floats(min_value=0.05, max_value=0.45),
    st.floats(min_value=0.0, max_value=0.04),
)
def test_nested_intervals_on_a_continuous_space(x, lower, shrink):
    model = lk.BinomialModel(8)
    outer = lk.Box.closed((lower, 1.0 - lower))
    inner = lk.Box.closed((lower + shrink, 1.0 - lower - shrink))
    sample = Sample.of(x)
    outer_nu = lk.nu(model, sample, outer, CFG).nu
    inner_nu = lk.nu(model, sample, inner, CFG).nu
    assert inner_nu <= outer_nu + 1e-9
    assert math.isclose(
        max(outer_nu, lk.nu(model, sample, lk.Complement(outer), CFG).nu), 1.0, abs_tol=1e-6
    )


@st.composite
def region_trees(draw, size, depth=3):
    kinds = ["leaf", "complement", "union", "intersection"] if depth else ["leaf"]
    kind = draw(st.sampled_from(kinds))
    if kind == "leaf":
        mask = np.array(draw(st.lists(st.booleans(), min_size=size, max_size=size)))
        return subset(mask), mask
    if kind == "complement":
        region, mask = draw(region_trees(size, depth - 1))
        return lk.Complement(region), ~mask
    (first, first_mask), (second, second_mask) = (
        draw(region_trees(size, depth - 1)),
        draw(region_trees(size, depth - 1)),
    )
    if kind == "union":
        return lk.Union((first, second)), first_mask | second_mask
    return lk.Intersection((first, second)), first_mask & second_mask


@FINITE_CASES
@given(finite_models(), st.data())
def test_region_trees_follow_set_semantics(args, data):
    model, row = args
    region, mask = data.draw(region_trees(len(row)))
    expected = row[mask].max() / row.max() if mask.any() else 0.0
    assert nu_of(model, region) == pytest.approx(expected, rel=1e-12, abs=1e-300)
    assert max(nu_of(model, region), nu_of(model, lk.Complement(region))) == 1.0


SURFACE_CFG = lk.OptConfig(threads=1, grid_base=40, multistarts=4)


@st.composite
def continuous_cases(draw):
    """A model, a sample and two closed boxes, on a 1-D or a 2-D parameter space."""
    if draw(st.booleans()):
        model = lk.BinomialModel(8)
        sample = Sample.of(draw(st.integers(min_value=0, max_value=8)))
        boxes = []
        for _ in range(2):
            lower = draw(st.floats(min_value=0.0, max_value=0.9))
            width = draw(st.floats(min_value=0.01, max_value=0.5))
            boxes.append(lk.Box.closed((lower, min(lower + width, 1.0))))
        return model, sample, boxes
    model = lk.NormalModel(20)
    sample = Sample.of(
        draw(st.floats(min_value=-2.0, max_value=2.0)),
        draw(st.floats(min_value=0.5, max_value=3.0)),
    )
    boxes = []
    for _ in range(2):
        mu = draw(st.floats(min_value=-3.0, max_value=2.5))
        sigma2 = draw(st.floats(min_value=0.1, max_value=3.0))
        widths = draw(st.tuples(*[st.floats(min_value=0.1, max_value=2.0)] * 2))
        boxes.append(lk.Box.closed((mu, mu + widths[0]), (sigma2, sigma2 + widths[1])))
    return model, sample, boxes


@CONTINUOUS_CASES
@given(continuous_cases())
def test_union_and_dichotomy_on_continuous_spaces(case):
    model, sample, (first, second) = case

    def measure(region):
        return lk.nu(model, sample, region, SURFACE_CFG).nu

    first_nu, second_nu = measure(first), measure(second)
    union_nu = measure(lk.Union((first, second)))
    assert union_nu == max(first_nu, second_nu)
    assert first_nu <= union_nu
    assert max(first_nu, measure(lk.Complement(first))) >= 1 - 1e-6
