import math

import pytest
from hypothesis import given, strategies as st

from hotstove.learners import (
    Averaging,
    BayesianNormal,
    EmptyBeliefError,
    RecencyWeighted,
    bayes_posterior_mean,
    init_belief,
    recency_closed_form,
    update_batch,
    update_one,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
weights = st.floats(0.001, 0.999)


class TestInit:
    def test_bayesian_starts_at_prior_mean(self):
        assert init_belief(BayesianNormal(0.0, 1.0, 1.0)).current_belief == 0.0

    def test_recency_starts_at_initial(self):
        assert init_belief(RecencyWeighted(0.5, 0.0)).current_belief == 0.0

    def test_averaging_has_no_belief(self):
        state = init_belief(Averaging())
        assert state.count == 0
        with pytest.raises(EmptyBeliefError):
            state.current_belief


class TestUpdate:
    def test_recency_one_step(self):
        assert update_one(RecencyWeighted(0.5, 0.0), init_belief(RecencyWeighted(0.5, 0.0)), 1.0).current_belief == 0.5

    def test_averaging_section_example(self):
        # two first-period payoffs summing to 2
        s = update_batch(Averaging(), init_belief(Averaging()), [2.0, 0.0])
        assert s.current_belief == 1.0
        assert s.sum_of_observations == 2.0

    @given(finite)
    def test_bayes_one_observation_halves(self, x):
        spec = BayesianNormal(0.0, 1.0, 1.0)
        assert update_one(spec, init_belief(spec), x).current_belief == pytest.approx(x / 2, abs=1e-12)

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            update_one(Averaging(), init_belief(Averaging()), math.inf)

    def test_averaging_batch(self):
        assert update_batch(Averaging(), init_belief(Averaging()), [1.0, -1.0]).current_belief == 0.0

    @given(finite, finite)
    def test_bayes_batch_equals_sequential(self, a, b):
        spec = BayesianNormal(0.3, 2.0, 5.0)
        s0 = init_belief(spec)
        assert update_batch(spec, s0, [a, b]) == update_one(spec, update_one(spec, s0, a), b)

    @given(weights, st.integers(1, 60))
    def test_recency_geometric(self, b, n):
        spec = RecencyWeighted(b, 0.0)
        z = update_batch(spec, init_belief(spec), [1.0] * n).current_belief
        assert z == pytest.approx(1 - (1 - b) ** n, abs=1e-12)

    @given(st.lists(finite, min_size=1, max_size=50))
    def test_averaging_is_mean(self, xs):
        s = update_batch(Averaging(), init_belief(Averaging()), xs)
        assert s.current_belief == pytest.approx(math.fsum(xs) / len(xs), rel=1e-12, abs=1e-9)

    @given(st.lists(finite, min_size=1, max_size=20))
    def test_order_independent_for_averaging_and_bayes(self, xs):
        for spec in (Averaging(), BayesianNormal(0.0, 1.0, 3.0)):
            a = update_batch(spec, init_belief(spec), xs).current_belief
            b = update_batch(spec, init_belief(spec), list(reversed(xs))).current_belief
            assert a == pytest.approx(b, rel=1e-12, abs=1e-9)


class TestRecencyClosedForm:
    def test_examples(self):
        assert recency_closed_form(-0.5, 0.5, [0.0]) == -0.25
        assert recency_closed_form(0.5, 0.5, [0.0, 0.0]) == 0.125

    @given(finite, weights, st.lists(finite, max_size=20))
    def test_matches_fold(self, z1, b, xs):
        # fold oracle
        z = z1
        for x in xs:
            z = (1 - b) * z + b * x
        assert recency_closed_form(z1, b, xs) == pytest.approx(z, rel=1e-12, abs=1e-9)


class TestPosteriorMean:
    def test_one_observation(self):
        assert bayes_posterior_mean(0.0, 1.0, 1.0, 3.0, 1) == 1.5

    def test_diffuse_prior_gives_average(self):
        assert bayes_posterior_mean(7.0, 1e9, 1.0, 10.0, 10) == pytest.approx(1.0, abs=1e-6)

    def test_no_data(self):
        assert bayes_posterior_mean(2.5, 1.0, 4.0, 0.0, 0) == 2.5

    def test_textbook_form(self):
        m, su, se, total, n = 0.4, 2.0, 3.0, 5.0, 4
        xbar = total / n
        expected = (xbar * su + (se / n) * m) / (su + se / n)
        assert bayes_posterior_mean(m, su, se, total, n) == pytest.approx(expected, rel=1e-14)

    @given(st.integers(1, 30), finite, finite)
    def test_strictly_increasing_in_sum_and_sign(self, n, s1, s2):
        if s1 == s2:
            return
        lo, hi = sorted((s1, s2))
        assert bayes_posterior_mean(0.0, 1.0, 2.0, lo, n) < bayes_posterior_mean(0.0, 1.0, 2.0, hi, n)
        b = bayes_posterior_mean(0.0, 1.0, 2.0, s1, n)
        assert math.copysign(1, b) == math.copysign(1, s1) or s1 == 0

    def test_negative_n_rejected(self):
        with pytest.raises(ValueError):
            bayes_posterior_mean(0, 1, 1, 0, -1)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.1, 1.5])
def test_recency_weight_bounds(bad):
    with pytest.raises(ValueError):
        RecencyWeighted(bad, 0.0)
