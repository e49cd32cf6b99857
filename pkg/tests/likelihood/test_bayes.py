import math

import numpy as np
import pytest

from lrpossib import likelihood as lk
from lrpossib.likelihood.types import Interval, Sample

UNIFORM = lk.ContinuousPrior.uniform([(0.0, 1.0)])


def fraser_at_six():
    model = lk.FraserModel.for_observation(6)
    return model, lk.FinitePrior.uniform(len(model.space.points))


def test_finite_posterior_sums_to_one(cfg):
    model, prior = fraser_at_six()
    x = Sample.of(6)
    total = 0.0
    for index in range(len(model.space.points)):
        total += lk.posterior_prob(model, x, prior, lk.FiniteSet.of_indices(index), cfg).post_prob
    assert total == pytest.approx(1.0, abs=1e-12)


def test_finite_posterior_of_the_maximizers(cfg):
    model, prior = fraser_at_six()
    summary = lk.posterior_prob(model, Sample.of(6), prior, lk.FiniteSet.of_values(3), cfg)
    assert summary.post_prob == pytest.approx(1 / 3)
    assert summary.c_x == pytest.approx(1 / 3)
    assert summary.error == 0.0


def test_full_and_empty_posterior(cfg):
    model, prior = fraser_at_six()
    x = Sample.of(6)
    assert lk.posterior_prob(model, x, prior, lk.Full(), cfg).post_prob == 1.0
    empty = lk.posterior_prob(model, x, prior, lk.Empty(), cfg)
    assert empty.post_prob == 0.0
    assert empty.prior_prob == 0.0
    assert not empty.bound_defined


@pytest.mark.parametrize("prior", [UNIFORM, lk.ContinuousPrior.beta(1.0, 1.0)])
def test_marginal_likelihood_under_a_flat_prior(prior, cfg):
    summary = lk.posterior_prob(
        lk.BinomialModel(8), Sample.of(4), prior, lk.Box.closed((0.4, 0.6)), cfg
    )
    assert summary.m_x == pytest.approx(1 / 9, rel=1e-6)
    assert summary.c_x == pytest.approx(70 / 256, rel=1e-9)
    assert summary.prior_prob == pytest.approx(0.2, rel=1e-6)
    assert summary.evidence_ratio == pytest.approx(256 / 630, rel=1e-6)
    assert 0 < summary.post_prob < 1


def test_posterior_bound_on_the_binomial(binomial_case, cfg):
    model = lk.BinomialModel(binomial_case["n"])
    x = Sample.of(binomial_case["x"])
    check = lk.lemma2_check(model, x, UNIFORM, lk.Box.closed((0.4, 0.6)), cfg)
    assert check.holds
    assert check.nu == pytest.approx(binomial_case["nu0"], abs=5e-4)


def test_consistency_on_a_narrow_region(cfg):
    check = lk.corollary1_check(
        lk.BinomialModel(8), Sample.of(4), UNIFORM, lk.Box.closed((0.49, 0.51)), cfg
    )
    assert check.applicable
    assert check.holds
    assert check.summary.post_prob <= check.nu


def test_bound_needs_prior_mass(cfg):
    model = lk.FiniteModel(["a", "b"], {"u": [0.3, 0.6]})
    prior = lk.FinitePrior((1.0, 0.0))
    with pytest.raises(lk.PreconditionError):
        lk.lemma2_check(model, Sample.of("u"), prior, lk.FiniteSet.of_indices(1), cfg)


def test_zero_marginal_likelihood(cfg):
    model = lk.FiniteModel(["a", "b"], {"u": [0.0, 0.6]})
    prior = lk.FinitePrior((1.0, 0.0))
    with pytest.raises(lk.PreconditionError):
        lk.posterior_prob(model, Sample.of("u"), prior, lk.Full(), cfg)


def test_impossible_region_is_improbable(cfg):
    model = lk.FiniteModel(["a", "b", "c"], {"u": [0.0, 0.6, 0.2]})
    prior = lk.FinitePrior((0.5, 0.25, 0.25))
    check = lk.impossibility_check(model, Sample.of("u"), prior, lk.FiniteSet.of_indices(0), cfg)
    assert check.holds
    assert (check.nu, check.post_prob) == (0.0, 0.0)


@pytest.mark.parametrize(
    "weights",
    [(0.5, 0.6), (1.2, -0.2), (math.nan, 1.0), ()],
)
def test_finite_prior_validation(weights):
    with pytest.raises(lk.InputError):
        lk.FinitePrior(weights)


def test_finite_prior_must_match_the_space(cfg):
    model, _ = fraser_at_six()
    with pytest.raises(lk.InputError):
        lk.posterior_prob(model, Sample.of(6), lk.FinitePrior((0.5, 0.5)), lk.Full(), cfg)
    with pytest.raises(lk.InputError):
        lk.posterior_prob(
            lk.BinomialModel(8), Sample.of(4), lk.FinitePrior((0.5, 0.5)), lk.Full(), cfg
        )


def test_continuous_prior_validation():
    with pytest.raises(lk.InputError):
        lk.ContinuousPrior.uniform([(0.0, 0.0)])
    with pytest.raises(lk.InputError):
        lk.ContinuousPrior.beta(0.0, 1.0)
    with pytest.raises(lk.InputError):
        lk.ContinuousPrior(lambda c: np.ones(len(c)), (Interval(0.0, math.inf),))
    with pytest.raises(lk.InputError):
        lk.ContinuousPrior(lambda c: np.full(len(c), 2.0), (Interval(0.0, 1.0),))
    with pytest.raises(lk.UnsupportedError):
        lk.ContinuousPrior.uniform([(0.0, 1.0)] * 3)


def test_two_dimensional_prior(cfg):
    prior = lk.ContinuousPrior.uniform([(-2.0, 2.0), (0.5, 4.5)])
    model = lk.NormalModel(10)
    summary = lk.posterior_prob(
        model, Sample.of(0.0, 2.0), prior, lk.Box.closed((-2.0, 2.0), (0.5, 2.5)), cfg
    )
    assert summary.prior_prob == pytest.approx(0.5, rel=1e-6)
    assert 0 < summary.post_prob < 1


def test_constrained_spaces_take_no_continuous_prior(cfg):
    prior = lk.ContinuousPrior.uniform([(0.0, 1.0), (0.0, 1.0)])
    with pytest.raises(lk.UnsupportedError):
        lk.posterior_prob(lk.TrinomialModel(), Sample.of(2, 5, 3), prior, lk.Full(), cfg)


def test_walley_moral(cfg):
    model, _ = fraser_at_six()
    x = Sample.of(6)
    result = lk.walley_moral(model, x, lk.FiniteSet.of_values(3), cfg)
    assert (result.upper, result.lower) == (1.0, 0.0)
    assert result.uniform_posterior == pytest.approx(1 / 3)
    full = lk.walley_moral(model, x, lk.Full(), cfg)
    assert (full.upper, full.lower, full.uniform_posterior) == (1.0, 1.0, 1.0)
    empty = lk.walley_moral(model, x, lk.Empty(), cfg)
    assert (empty.upper, empty.lower, empty.uniform_posterior) == (0.0, 0.0, 0.0)


def test_walley_moral_needs_a_finite_space(cfg):
    with pytest.raises(lk.UnsupportedError):
        lk.walley_moral(lk.BinomialModel(8), Sample.of(4), lk.Full(), cfg)
