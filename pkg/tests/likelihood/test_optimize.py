import math

import numpy as np
import pytest

from lrpossib import likelihood as lk
from lrpossib.likelihood.types import Method, ParamPoint, Sample


def grid_oracle(model, x, lows, highs, points):
    axes = [np.linspace(lo, hi, points) for lo, hi in zip(lows, highs)]
    grids = np.meshgrid(*axes, indexing="ij")
    coords = np.stack([g.reshape(-1) for g in grids], axis=1)
    return float(np.max(model.loglik_many(coords, x)))


def test_binomial_boundary_supremum(cfg):
    model = lk.BinomialModel(8)
    result = lk.restricted_sup(model, Sample.of(0), lk.Box.closed((0.4, 0.6)), cfg)
    assert result.converged and result.feasible
    assert result.witness.coords[0] == pytest.approx(0.4, abs=1e-7)
    reference = lk.global_sup(model, Sample.of(0), cfg)
    assert math.exp(result.sup_loglik - reference.sup_loglik) == pytest.approx(0.6 ** 8, rel=1e-6)


def test_poisson_boundary_supremum(cfg):
    model = lk.PoissonModel()
    result = lk.restricted_sup(model, Sample.of(8), lk.Box.closed((0.0, 3.0)), cfg)
    assert result.witness.coords[0] == pytest.approx(3.0, abs=1e-7)
    assert result.method is Method.GOLDEN_SECTION


def test_poisson_region_beyond_the_bracket(cfg):
    model = lk.PoissonModel()
    region = lk.Complement(lk.Box.closed((0.0, 10.0)))
    result = lk.restricted_sup(model, Sample.of(0), region, cfg)
    assert result.feasible
    assert result.witness.coords[0] == pytest.approx(10.0, abs=1e-6)
    assert result.sup_loglik == pytest.approx(-10.0, abs=1e-6)


def test_empty_region(cfg):
    result = lk.restricted_sup(lk.BinomialModel(8), Sample.of(4), lk.Empty(), cfg)
    assert result.sup_loglik == -math.inf
    assert result.witness is None
    assert not result.feasible


@pytest.mark.parametrize(
    "model, x, witness",
    [
        (lk.NormalModel(20), Sample.of(0.0, 2.0), (0.0, 2.0)),
        (lk.TrinomialModel(), Sample.of(2, 5, 3), (0.2, 0.5, 0.3)),
        (lk.BinomialModel(8), Sample.of(4), (0.5,)),
    ],
)
def test_global_sup_uses_closed_form(model, x, witness, cfg):
    result = lk.global_sup(model, x, cfg)
    assert result.method is Method.CLOSED_FORM
    assert result.witness.coords == pytest.approx(witness)


def test_mle_sets(cfg):
    fraser = lk.FraserModel.for_observation(6)
    assert [p.coords[0] for p in lk.mle_set(fraser, Sample.of(6), cfg)] == [3.0, 12.0, 13.0]
    severini = lk.SeveriniModel.for_observation(6)
    assert [p.coords[0] for p in lk.mle_set(severini, Sample.of(6), cfg)] == [13.0]
    binomial = lk.BinomialModel(8)
    assert [p.coords for p in lk.mle_set(binomial, Sample.of(4), cfg)] == [(0.5,)]


def test_finite_ties_break_on_smallest_coordinates(cfg):
    fraser = lk.FraserModel.for_observation(6)
    result = lk.global_sup(fraser, Sample.of(6), cfg)
    assert result.method is Method.ENUMERATION
    assert result.witness.coords == (3.0,)


def test_sample_statuses(cfg):
    model = lk.FiniteModel(["a", "b"], {"seen": [0.2, 0.8], "never": [0.0, 0.0]})
    assert lk.validate_sample(model, Sample.of("seen"), cfg) is lk.SampleStatus.OK
    assert lk.validate_sample(model, Sample.of("never"), cfg) is lk.SampleStatus.C1_VIOLATED
    with pytest.raises(lk.SampleError) as error:
        lk.checked_global_sup(model, Sample.of("never"), cfg)
    assert error.value.status is lk.SampleStatus.C1_VIOLATED
    with pytest.raises(lk.InputError):
        lk.validate_sample(lk.BinomialModel(8), Sample.of(9), cfg)


def test_union_is_the_best_member(cfg):
    model = lk.PoissonModel()
    x = Sample.of(4)
    low, high = lk.Box.closed((0.0, 1.0)), lk.Box.closed((6.0, 7.0))
    parts = [lk.restricted_sup(model, x, r, cfg).sup_loglik for r in (low, high)]
    union = lk.restricted_sup(model, x, lk.Union((low, high)), cfg)
    assert union.sup_loglik == max(parts)


def one_dimensional_problem(seed):
    rng = np.random.default_rng(seed)
    if seed % 2:
        lo, hi = sorted(rng.uniform(0.0, 25.0, size=2))
        return lk.PoissonModel(), Sample.of(int(rng.integers(0, 21))), lo, hi
    n = int(rng.integers(1, 30))
    lo, hi = sorted(rng.uniform(0.01, 0.99, size=2))
    return lk.BinomialModel(n), Sample.of(int(rng.integers(0, n + 1))), lo, hi


@pytest.mark.parametrize("seed", range(100))
def test_one_dimensional_oracle(seed, cfg):
    model, x, lo, hi = one_dimensional_problem(seed)
    result = lk.restricted_sup(model, x, lk.Box.closed((lo, hi)), cfg)
    oracle = grid_oracle(model, x, [lo], [hi], 100_000)
    assert result.sup_loglik >= oracle - 1e-6 * max(1.0, abs(oracle))
    assert result.sup_loglik <= oracle + 1e-6 * max(1.0, abs(oracle))


@pytest.mark.parametrize("seed", range(50))
def test_two_dimensional_oracle(seed, cfg):
    rng = np.random.default_rng(100 + seed)
    model = lk.NormalModel(20)
    x = Sample.of(float(rng.normal()), float(rng.uniform(0.5, 3.0)))
    mu_lo = float(rng.uniform(-2.0, 1.0))
    s_lo = float(rng.uniform(0.2, 2.0))
    lows, highs = [mu_lo, s_lo], [mu_lo + 1.0, s_lo + 1.5]
    region = lk.Box.closed(*zip(lows, highs))
    result = lk.restricted_sup(model, x, region, cfg)
    oracle = grid_oracle(model, x, lows, highs, 1000)
    assert result.sup_loglik >= oracle - 1e-6 * max(1.0, abs(oracle))
    assert region.contains(result.witness, lk.Mode.CLOSURE, 1e-9)


@pytest.mark.parametrize(
    "counts", [(5, 0, 5), (2, 5, 3), (9, 5, 6), (1, 8, 11), (3, 3, 4), (0, 4, 6)]
)
def test_equality_curve_without_a_closed_form(counts, cfg):
    curve = lk.Constraint.named("hwe", lk.Relation.EQ, 1.0, arity=3)
    value = lk.nu(lk.TrinomialModel(), Sample.of(*counts), curve, cfg)
    assert value.sup.feasible
    assert value.nu == pytest.approx(lk.hwe_report(lk.HweSample(*counts)).nu1, abs=1e-4)
    theta1, _, theta3 = value.witness.coords
    assert math.sqrt(theta1) + math.sqrt(theta3) == pytest.approx(1.0, abs=1e-8)


def test_results_do_not_depend_on_threads():
    model = lk.TrinomialModel()
    x = Sample.of(9, 5, 6)
    region = lk.Intersection(
        (lk.Complement(lk.hwe_regions()[1]), lk.Box.closed((0.0, 0.4), (0.0, 1.0), (0.0, 1.0)))
    )
    results = [
        lk.restricted_sup(model, x, region, lk.OptConfig(threads=threads)) for threads in (1, 2, 8)
    ]
    assert len({r.sup_loglik for r in results}) == 1
    assert len({r.witness for r in results}) == 1


def test_deterministic_given_seed():
    model = lk.NormalModel(20)
    x = Sample.of(0.0, 2.0)
    region = lk.Constraint.linear([1.0, 1.0], lk.Relation.GE, 4.0)
    cfg = lk.OptConfig(seed=7, threads=1)
    first = lk.restricted_sup(model, x, region, cfg)
    second = lk.restricted_sup(model, x, region, cfg)
    assert first == second
    assert region.contains(first.witness, lk.Mode.CLOSURE, 1e-9)


def test_witness_in_point_region(cfg):
    model = lk.BinomialModel(8)
    result = lk.restricted_sup(model, Sample.of(4), lk.FiniteSet.of_values(0.3, 0.45), cfg)
    assert result.method is Method.ENUMERATION
    assert result.witness == ParamPoint.of(0.45)
