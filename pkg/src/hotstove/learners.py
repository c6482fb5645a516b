"""Belief-formation rules: sample averaging, recency weighting, normal-normal Bayes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np


class EmptyBeliefError(ValueError):
    """An averaging learner has no belief before its first observation."""


@dataclass(frozen=True)
class Averaging:
    pass


@dataclass(frozen=True)
class RecencyWeighted:
    """Exponential updating ``z <- (1 - weight) * z + weight * x``."""

    weight: float
    initial: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.weight < 1.0:
            raise ValueError(f"weight must be in (0, 1), got {self.weight!r}")
        if not math.isfinite(self.initial):
            raise ValueError("initial belief must be finite")


@dataclass(frozen=True)
class BayesianNormal:
    prior_mean: float = 0.0
    prior_variance: float = 1.0
    noise_variance: float = 1.0

    def __post_init__(self):
        if not math.isfinite(self.prior_mean):
            raise ValueError("prior_mean must be finite")
        for name in ("prior_variance", "noise_variance"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and > 0, got {v!r}")


LearnerSpec = Union[Averaging, RecencyWeighted, BayesianNormal]


@dataclass(frozen=True)
class BeliefState:
    sum_of_observations: float = 0.0
    count: int = 0
    belief: Optional[float] = None

    @property
    def current_belief(self) -> float:
        if self.belief is None:
            raise EmptyBeliefError("no observations yet, so there is no average")
        return self.belief


def bayes_posterior_mean(prior_mean, prior_variance, noise_variance, total, n):
    """Posterior mean of ``u`` after ``n`` observations summing to ``total``.

    Works elementwise on arrays. ``n == 0`` returns the prior mean.
    """
    n_arr = np.asarray(n)
    if np.any(n_arr < 0):
        raise ValueError("n must be >= 0")
    # (xbar*su2 + (se2/n)*m) / (su2 + se2/n), multiplied through by n
    out = (np.asarray(total) * prior_variance + noise_variance * prior_mean) / (
        n_arr * prior_variance + noise_variance
    )
    return float(out) if np.ndim(out) == 0 else out


def init_belief(spec: LearnerSpec) -> BeliefState:
    if isinstance(spec, Averaging):
        return BeliefState()
    if isinstance(spec, RecencyWeighted):
        return BeliefState(belief=spec.initial)
    if isinstance(spec, BayesianNormal):
        return BeliefState(belief=spec.prior_mean)
    raise TypeError(f"unknown learner {spec!r}")


def update_one(spec: LearnerSpec, state: BeliefState, x: float) -> BeliefState:
    if not math.isfinite(x):
        raise ValueError(f"observation must be finite, got {x!r}")
    total = state.sum_of_observations + x
    count = state.count + 1
    if isinstance(spec, Averaging):
        return BeliefState(total, count, total / count)
    if isinstance(spec, RecencyWeighted):
        b = spec.weight
        return BeliefState(total, count, (1.0 - b) * state.current_belief + b * x)
    if isinstance(spec, BayesianNormal):
        belief = bayes_posterior_mean(
            spec.prior_mean, spec.prior_variance, spec.noise_variance, total, count
        )
        return BeliefState(total, count, belief)
    raise TypeError(f"unknown learner {spec!r}")


def update_batch(spec: LearnerSpec, state: BeliefState, xs: Iterable[float]) -> BeliefState:
    for x in xs:
        state = update_one(spec, state, x)
    return state


def recency_closed_form(z1: float, b: float, xs: Sequence[float]) -> float:
    """Belief after folding ``xs`` into ``z1`` with weight ``b``, in closed form."""
    if not 0.0 < b < 1.0:
        raise ValueError(f"b must be in (0, 1), got {b!r}")
    n = len(xs)
    keep = 1.0 - b
    terms = [z1 * keep**n]
    terms.extend(b * keep ** (n - j) * x for j, x in enumerate(xs, start=1))
    return math.fsum(terms)
