import dataclasses

import numpy as np
import pytest

from hotstove.distributions import DiscreteSymmetric, FixedMean, HierarchicalNormal, Laplace, Normal
from hotstove.engine import (
    BLOCK_SIZE,
    ExperimentConfig,
    IncompatibleConfig,
    default_workers,
    iter_outcomes,
    run_experiment,
    run_trial,
    simulate_block,
)
from hotstove.learners import Averaging, BayesianNormal, RecencyWeighted
from hotstove.policies import AffineMonotone, Constant, Step
from hotstove.rng import derive_trial_rng
from hotstove.stats import HistogramBins


def _cfg(**kw):
    base = dict(
        environment=FixedMean(Normal(0.0, 1.0)),
        learner=Averaging(),
        policy=Step(0.0, 10, 1),
        k=2,
        trials=2000,
        seed=11,
    )
    base.update(kw)
    return ExperimentConfig(**base)


CONFIGS = {
    "averaging-normal": _cfg(),
    "averaging-laplace": _cfg(environment=FixedMean(Laplace(0.3, 2.0)), policy=AffineMonotone(2.0, 1.5)),
    "averaging-discrete": _cfg(environment=FixedMean(DiscreteSymmetric(1.0, ((1.0, 0.5),))), k=3),
    "recency": _cfg(learner=RecencyWeighted(0.4, 0.0), policy=Step(0.1, 1, 7)),
    "bayesian": _cfg(
        environment=HierarchicalNormal(0.5, 2.0, 3.0), learner=BayesianNormal(0.5, 2.0, 3.0)
    ),
}


@pytest.mark.parametrize("name", sorted(CONFIGS))
def test_scalar_path_matches_vectorized(name):
    cfg = CONFIGS[name]
    block = simulate_block(cfg, 100, 300)
    for j, i in enumerate(range(100, 300)):
        t = run_trial(cfg, i)
        assert t.second_period_n == block["second_period_n"][j]
        assert t.first_period_signal == pytest.approx(block["first_period_signal"][j], abs=1e-12)
        assert t.final_belief == pytest.approx(block["final_belief"][j], abs=1e-12)
        assert t.true_mean == pytest.approx(block["true_mean"][j], abs=1e-12)


def test_averaging_final_is_mean_of_all_draws():
    cfg = _cfg(policy=Constant(3))
    from hotstove.distributions import sample

    for i in range(20):
        stream = derive_trial_rng(cfg.seed, i)
        stream.position = 1
        xs = [sample(Normal(0.0, 1.0), stream) for _ in range(5)]
        assert run_trial(cfg, i).final_belief == pytest.approx(np.mean(xs), abs=1e-14)


def test_constant_policy_sizes():
    block = simulate_block(_cfg(policy=Constant(4)), 0, 500)
    assert np.all(block["second_period_n"] == 4)


def test_step_policy_sizes_follow_signal():
    block = simulate_block(_cfg(), 0, 500)
    expected = np.where(block["first_period_signal"] > 0, 10, 1)
    assert np.array_equal(block["second_period_n"], expected)


@pytest.mark.parametrize("workers", [1, 2, 8])
def test_results_independent_of_workers(workers):
    cfg = _cfg(trials=3 * BLOCK_SIZE + 17, histogram_bins=HistogramBins(20, -3.0, 3.0))
    ref = run_experiment(cfg, workers=1)
    got = run_experiment(cfg, workers=workers)
    assert got.summary == ref.summary
    assert got.histogram == ref.histogram


def test_seed_changes_results():
    a = run_experiment(_cfg(seed=1), 1).summary
    b = run_experiment(_cfg(seed=2), 1).summary
    assert a.mean != b.mean


def test_iter_outcomes_matches_run_experiment():
    cfg = _cfg(trials=500)
    finals = [o.final_belief for o in iter_outcomes(cfg)]
    assert run_experiment(cfg, 1).summary.mean == pytest.approx(np.mean(finals), abs=1e-14)


def test_increasing_policy_biases_average_downwards():
    s = run_experiment(_cfg(trials=200_000), 2).summary
    assert s.mean < -0.14 + 4 * s.se_mean
    assert s.mean < 0


class TestValidation:
    def test_bayesian_needs_hierarchical(self):
        with pytest.raises(IncompatibleConfig):
            _cfg(learner=BayesianNormal(0.0, 1.0, 1.0))

    def test_bayesian_parameters_must_match(self):
        with pytest.raises(IncompatibleConfig):
            _cfg(environment=HierarchicalNormal(0.0, 1.0, 2.0), learner=BayesianNormal(0.0, 1.0, 1.0))

    def test_averaging_needs_fixed_mean(self):
        with pytest.raises(IncompatibleConfig):
            _cfg(environment=HierarchicalNormal(0.0, 1.0, 1.0))

    @pytest.mark.parametrize("field, value", [("k", 0), ("trials", 0), ("seed", -1), ("seed", 2**64), ("k", 1.5)])
    def test_bad_numbers(self, field, value):
        with pytest.raises(ValueError):
            dataclasses.replace(CONFIGS["averaging-normal"], **{field: value})

    def test_workers_must_be_positive(self):
        with pytest.raises(ValueError):
            run_experiment(_cfg(), workers=0)

    def test_threads_env(self, monkeypatch):
        monkeypatch.setenv("HOTSTOVE_THREADS", "3")
        assert default_workers() == 3
        monkeypatch.setenv("HOTSTOVE_THREADS", "0")
        with pytest.raises(ValueError):
            default_workers()
