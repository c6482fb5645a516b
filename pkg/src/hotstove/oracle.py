"""Exact enumeration of the two-period protocol over finite payoff alphabets.

Averaging runs iterate over multisets with multinomial weights; the recency
learner is order dependent and enumerates raw sequences.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Union

from hotstove.distributions import DiscreteSymmetric, FiniteDiscrete
from hotstove.policies import SamplingPolicy, sample_size

PATH_LIMIT = 10**8
EQUAL_TOL = 1e-12


class PathLimitExceeded(ValueError):
    pass


@dataclass(frozen=True)
class EnumerationResult:
    expected_final_belief: float
    prob_final_above_u: float
    prob_final_below_u: float
    prob_final_equal_u: float
    total_paths: int
    reference: float
    warning: str | None = None


class CovarianceIdentity(NamedTuple):
    bias: float
    covariance: float
    average_covariance: float


Discrete = Union[FiniteDiscrete, DiscreteSymmetric]


def _finite(dist: Discrete) -> FiniteDiscrete:
    if not isinstance(dist, (FiniteDiscrete, DiscreteSymmetric)):
        raise TypeError("enumeration needs a finite discrete distribution")
    return dist.as_finite()


def _multisets(dist: FiniteDiscrete, r: int):
    """Yield ``(sum, probability)`` over multisets of size ``r``."""
    values, probs = dist.values, dist.probabilities
    fact_r = math.factorial(r)
    for combo in itertools.combinations_with_replacement(range(len(values)), r):
        counts = [0] * len(values)
        for i in combo:
            counts[i] += 1
        weight = fact_r
        p = 1.0
        for i, c in enumerate(counts):
            if c:
                weight //= math.factorial(c)
                p *= probs[i] ** c
        yield math.fsum(values[i] for i in combo), weight * p


@lru_cache(maxsize=64)
def _sum_distribution(dist: FiniteDiscrete, r: int) -> tuple[tuple[float, float], ...]:
    return tuple(_multisets(dist, r))


def _sequences(dist: FiniteDiscrete, r: int):
    """Yield ``(values, probability)`` over ordered sequences of length ``r``."""
    for seq in itertools.product(dist.support, repeat=r):
        p = math.prod(q for _, q in seq)
        yield tuple(v for v, _ in seq), p


def _check_paths(dist: FiniteDiscrete, k: int, max_n: int) -> None:
    m = len(dist.support)
    if (k + max_n) * math.log10(m) > math.log10(PATH_LIMIT) + 1e-12:
        raise PathLimitExceeded(
            f"{m}**({k}+{max_n}) outcome sequences exceed the limit of {PATH_LIMIT}"
        )


def _classify(final: float, u: float) -> int:
    if math.isclose(final, u, rel_tol=0.0, abs_tol=EQUAL_TOL * max(1.0, abs(u))):
        return 0
    return 1 if final > u else -1


class _Accumulator:
    def __init__(self):
        self.mean_terms = []
        self.side = {-1: [], 0: [], 1: []}

    def add(self, final: float, p: float, u: float) -> None:
        self.mean_terms.append(final * p)
        self.side[_classify(final, u)].append(p)

    def result(self, total_paths: int, u: float, warning=None) -> EnumerationResult:
        return EnumerationResult(
            expected_final_belief=math.fsum(self.mean_terms),
            prob_final_above_u=math.fsum(self.side[1]),
            prob_final_below_u=math.fsum(self.side[-1]),
            prob_final_equal_u=math.fsum(self.side[0]),
            total_paths=total_paths,
            reference=u,
            warning=warning,
        )


def _first_period_averages(dist: FiniteDiscrete, k: int, policy: SamplingPolicy):
    first = [(s1, p, sample_size(policy, s1 / k)) for s1, p in _sum_distribution(dist, k)]
    _check_paths(dist, k, max(n for _, _, n in first))
    return first


def _raw_path_count(dist: FiniteDiscrete, k: int, policy, signal_of_sequence) -> int:
    m = len(dist.support)
    total = 0
    for seq, _ in _sequences(dist, k):
        total += m ** sample_size(policy, signal_of_sequence(seq))
    return total


def enumerate_expected_final_average(
    dist: Discrete, k: int, policy: SamplingPolicy
) -> EnumerationResult:
    """Exact law of the final average for an averaging learner."""
    fd = _finite(dist)
    u = fd.mean
    acc = _Accumulator()
    for s1, p1, n in _first_period_averages(fd, k, policy):
        for s2, p2 in _sum_distribution(fd, n):
            acc.add((s1 + s2) / (k + n), p1 * p2, u)
    paths = _raw_path_count(fd, k, policy, lambda seq: math.fsum(seq) / k)
    return acc.result(paths, u)


def enumerate_covariance_identity(
    dist: Discrete, k: int, policy: SamplingPolicy
) -> CovarianceIdentity:
    """Bias of the final average next to Cov(first-period sum, 1/(k + n)).

    The two are equal for every policy and distribution. ``average_covariance``
    is Cov(first-period average, 1/(k + n)), which is ``covariance / k``.
    """
    fd = _finite(dist)
    u = fd.mean
    first = _first_period_averages(fd, k, policy)
    expected_final = enumerate_expected_final_average(fd, k, policy).expected_final_belief
    e_s = math.fsum(p * s for s, p, _ in first)
    e_g = math.fsum(p / (k + n) for _, p, n in first)
    e_sg = math.fsum(p * s / (k + n) for s, p, n in first)
    cov = e_sg - e_s * e_g
    return CovarianceIdentity(expected_final - u, cov, cov / k)


def _recency_fold(z: float, b: float, xs) -> float:
    for x in xs:
        z = (1.0 - b) * z + b * x
    return z


def _recency_first(fd, k, policy, b, z0):
    first = []
    for seq, p in _sequences(fd, k):
        z1 = _recency_fold(z0, b, seq)
        first.append((z1, p, sample_size(policy, z1)))
    _check_paths(fd, k, max(n for _, _, n in first))
    return first


def _check_recency(fd, b, z0, theorem_check):
    if not 0.0 < b < 1.0:
        raise ValueError("b must be in (0, 1)")
    u = fd.mean
    if math.isclose(z0, u, rel_tol=0.0, abs_tol=EQUAL_TOL):
        return None
    if theorem_check:
        raise ValueError(f"initial belief {z0!r} differs from the mean {u!r}")
    return f"initial belief {z0!r} differs from the mean {u!r}; the sign law need not hold"


def enumerate_expected_final_belief_recency(
    dist: Discrete,
    k: int,
    policy: SamplingPolicy,
    b: float,
    z0: float,
    theorem_check: bool = True,
) -> EnumerationResult:
    """Exact law of the final recency-weighted belief.

    With ``theorem_check`` a ``z0`` different from the distribution mean is an
    error; otherwise the result carries a warning.
    """
    fd = _finite(dist)
    warning = _check_recency(fd, b, z0, theorem_check)
    u = fd.mean
    acc = _Accumulator()
    m = len(fd.support)
    paths = 0
    for z1, p1, n in _recency_first(fd, k, policy, b, z0):
        paths += m**n
        for seq, p2 in _sequences(fd, n):
            acc.add(_recency_fold(z1, b, seq), p1 * p2, u)
    return acc.result(paths, u, warning)


def enumerate_recency_covariance_identity(
    dist: Discrete, k: int, policy: SamplingPolicy, b: float, z0: float
) -> tuple[float, float]:
    """``(E[z2] - u, Cov(z1, (1 - b)**n(z1)))``; equal whenever ``z0`` is the mean."""
    fd = _finite(dist)
    _check_recency(fd, b, z0, True)
    first = _recency_first(fd, k, policy, b, z0)
    e_z = math.fsum(p * z for z, p, _ in first)
    e_g = math.fsum(p * (1.0 - b) ** n for _, p, n in first)
    e_zg = math.fsum(p * z * (1.0 - b) ** n for z, p, n in first)
    result = enumerate_expected_final_belief_recency(fd, k, policy, b, z0)
    return result.expected_final_belief - fd.mean, e_zg - e_z * e_g
