"""Monte Carlo execution of the two-period protocol.

Trials are processed in fixed-size blocks of consecutive indices. Each
block is vectorized and summarized on its own, and the block summaries are
merged in index order. Results are therefore identical for any worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np
from scipy import special

from hotstove.distributions import (
    EnvironmentSpec,
    FixedMean,
    HierarchicalNormal,
    Normal,
    sample,
)
from hotstove.learners import (
    Averaging,
    BayesianNormal,
    LearnerSpec,
    RecencyWeighted,
    bayes_posterior_mean,
    init_belief,
    update_batch,
)
from hotstove.policies import SamplingPolicy, sample_size
from hotstove.rng import derive_trial_rng, trial_keys, uniforms
from hotstove.stats import Histogram, HistogramBins, SummaryStats

BLOCK_SIZE = 1 << 15
THREADS_ENV = "HOTSTOVE_THREADS"


class IncompatibleConfig(ValueError):
    """Learner and environment cannot be paired."""


@dataclass(frozen=True)
class ExperimentConfig:
    environment: EnvironmentSpec
    learner: LearnerSpec
    policy: SamplingPolicy
    k: int
    trials: int
    seed: int
    histogram_bins: Optional[HistogramBins] = None
    config_id: str = "experiment"

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be an integer >= 1, got {self.k!r}")
        if isinstance(self.trials, bool) or int(self.trials) != self.trials or self.trials < 1:
            raise ValueError(f"trials must be an integer >= 1, got {self.trials!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")
        validate_pairing(self.environment, self.learner)

    @property
    def reference(self) -> float:
        return float(self.environment.mean)


def validate_pairing(environment: EnvironmentSpec, learner: LearnerSpec) -> None:
    if isinstance(learner, BayesianNormal):
        if not isinstance(environment, HierarchicalNormal):
            raise IncompatibleConfig("a Bayesian learner needs a hierarchical_normal environment")
        mine = (learner.prior_mean, learner.prior_variance, learner.noise_variance)
        env = (environment.prior_mean, environment.prior_variance, environment.noise_variance)
        if mine != env:
            raise IncompatibleConfig(
                f"Bayesian learner parameters {mine} do not match the environment {env}"
            )
    elif isinstance(learner, (Averaging, RecencyWeighted)):
        if not isinstance(environment, FixedMean):
            raise IncompatibleConfig(
                f"{type(learner).__name__} learner needs a fixed_mean environment"
            )
    else:
        raise TypeError(f"unknown learner {learner!r}")


@dataclass(frozen=True)
class TrialOutcome:
    first_period_signal: float
    second_period_n: int
    final_belief: float
    true_mean: float


@dataclass(frozen=True)
class ExperimentResult:
    summary: SummaryStats
    histogram: Optional[Histogram] = None


# --- scalar reference path -------------------------------------------------


def run_trial(config: ExperimentConfig, trial_index: int) -> TrialOutcome:
    """One trial, drawn one variate at a time. Matches the vectorized engine."""
    stream = derive_trial_rng(config.seed, trial_index)
    env = config.environment
    if isinstance(env, HierarchicalNormal):
        u = env.prior_mean + math.sqrt(env.prior_variance) * float(special.ndtri(stream.uniform()))
        payoff = Normal(u, env.noise_variance)
    else:
        stream.position = 1
        u = env.mean
        payoff = env.payoff
    state = update_batch(
        config.learner, init_belief(config.learner), [sample(payoff, stream) for _ in range(config.k)]
    )
    signal = state.current_belief
    n = sample_size(config.policy, signal)
    state = update_batch(config.learner, state, [sample(payoff, stream) for _ in range(n)])
    return TrialOutcome(signal, n, state.current_belief, u)


# --- vectorized path -------------------------------------------------------


def _payoffs(env, true_mean, u):
    if isinstance(env, HierarchicalNormal):
        return true_mean + math.sqrt(env.noise_variance) * special.ndtri(u)
    return env.payoff.ppf(u)


def _recency_weights(b: float, n: int) -> np.ndarray:
    # weight on the j-th of n observations is b * (1 - b)**(n - j)
    return b * (1.0 - b) ** np.arange(n - 1, -1, -1, dtype=float)


def simulate_block(config: ExperimentConfig, start: int, stop: int) -> dict[str, np.ndarray]:
    """Outcomes of trials ``start .. stop-1`` as arrays keyed like TrialOutcome fields."""
    k, env, learner = config.k, config.environment, config.learner
    size = stop - start
    keys = trial_keys(config.seed, np.arange(start, stop, dtype=np.uint64))
    if isinstance(env, HierarchicalNormal):
        true_mean = env.prior_mean + math.sqrt(env.prior_variance) * special.ndtri(uniforms(keys, 0))
    else:
        true_mean = np.full(size, float(env.mean))

    draws = np.arange(1, k + 1, dtype=np.uint64)
    x1 = _payoffs(env, true_mean[:, None], uniforms(keys[:, None], draws[None, :]))
    s1 = x1.sum(axis=1)
    if isinstance(learner, Averaging):
        signal = s1 / k
    elif isinstance(learner, RecencyWeighted):
        b = learner.weight
        signal = learner.initial * (1.0 - b) ** k + x1 @ _recency_weights(b, k)
    else:
        signal = bayes_posterior_mean(
            learner.prior_mean, learner.prior_variance, learner.noise_variance, s1, k
        )

    n = config.policy.sizes(signal)
    owner = np.repeat(np.arange(size), n)
    offset = np.arange(owner.size) - np.repeat(np.cumsum(n) - n, n)
    x2 = _payoffs(env, true_mean[owner], uniforms(keys[owner], (k + 1 + offset).astype(np.uint64)))
    if isinstance(learner, RecencyWeighted):
        b = learner.weight
        w = b * (1.0 - b) ** (n[owner] - 1 - offset)
        final = signal * (1.0 - b) ** n + np.bincount(owner, weights=w * x2, minlength=size)
    else:
        total = s1 + np.bincount(owner, weights=x2, minlength=size)
        if isinstance(learner, Averaging):
            final = total / (k + n)
        else:
            final = bayes_posterior_mean(
                learner.prior_mean, learner.prior_variance, learner.noise_variance, total, k + n
            )
    return {
        "first_period_signal": signal,
        "second_period_n": n,
        "final_belief": final,
        "true_mean": true_mean,
    }


def iter_outcomes(config: ExperimentConfig, start: int = 0, stop: Optional[int] = None) -> Iterator[TrialOutcome]:
    stop = config.trials if stop is None else stop
    for lo in range(start, stop, BLOCK_SIZE):
        block = simulate_block(config, lo, min(lo + BLOCK_SIZE, stop))
        for row in zip(*block.values()):
            yield TrialOutcome(float(row[0]), int(row[1]), float(row[2]), float(row[3]))


def default_workers() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        value = int(env)
        if value < 1:
            raise ValueError(f"{THREADS_ENV} must be >= 1")
        return value
    return os.cpu_count() or 1


def _summarize_block(config: ExperimentConfig, lo: int, hi: int):
    final = simulate_block(config, lo, hi)["final_belief"]
    hist = Histogram.from_values(final, config.histogram_bins) if config.histogram_bins else None
    return SummaryStats.from_values(final, config.reference), hist


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None) -> ExperimentResult:
    workers = default_workers() if workers is None else workers
    if workers < 1:
        raise ValueError("workers must be >= 1")
    blocks = [(lo, min(lo + BLOCK_SIZE, config.trials)) for lo in range(0, config.trials, BLOCK_SIZE)]
    if workers == 1:
        parts = [_summarize_block(config, lo, hi) for lo, hi in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda b: _summarize_block(config, *b), blocks))
    summary = SummaryStats(config.reference)
    hist = Histogram.empty(config.histogram_bins) if config.histogram_bins else None
    for s, h in parts:
        summary = summary.merge(s)
        if hist is not None:
            hist = hist.merge(h)
    return ExperimentResult(summary, hist)
