"""Closed forms and quadratures for the two-period protocol with normal payoffs."""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from hotstove.distributions import normal_cdf, std_normal_cdf
from hotstove.policies import AffineMonotone, Constant, SamplingPolicy, Step
from hotstove.quadrature import QuadratureSettings, integrate

DEFAULT_QUADRATURE = QuadratureSettings()


def _require_positive_int(name: str, v: int) -> None:
    if isinstance(v, bool) or int(v) != v or v < 1:
        raise ValueError(f"{name} must be an integer >= 1, got {v!r}")


def step_policy_bias_closed_form(k: int, h: int, l: int, c: float, sigma: float) -> float:
    """Expected final average (true mean 0) for a step policy and N(0, sigma^2) payoffs."""
    for name, v in (("k", k), ("h", h), ("l", l)):
        _require_positive_int(name, v)
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    return (
        -sigma * math.sqrt(k) * (h - l) * math.exp(-c * c * k / (2.0 * sigma * sigma))
        / (math.sqrt(2.0 * math.pi) * (k + l) * (k + h))
    )


def conditional_final_average(first_average: float, k: int, n: int, u: float) -> float:
    """E[final average | first-period average], second period of size ``n``."""
    _require_positive_int("k", k)
    _require_positive_int("n", n)
    return (k * first_average + n * u) / (k + n)


def recency_conditional_expectation(z1: float, b: float, n: int, u: float) -> float:
    """E[recency belief after ``n`` more draws | belief ``z1``]."""
    if not 0.0 < b < 1.0:
        raise ValueError("b must be in (0, 1)")
    _require_positive_int("n", n)
    keep = (1.0 - b) ** n
    return z1 * keep + (1.0 - keep) * u


def normal_sum_tail_prob(kk: int, r: float, sigma: float) -> float:
    """P(sum of ``kk`` i.i.d. N(0, sigma^2) > r)."""
    _require_positive_int("kk", kk)
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    return 1.0 - normal_cdf(r / (sigma * math.sqrt(kk)))


# --- policy helpers for quadrature -----------------------------------------


def shift_policy(policy: SamplingPolicy, offset: float) -> SamplingPolicy:
    """Policy ``p'`` with ``p'(s) == p(s + offset)``."""
    if isinstance(policy, Step):
        return Step(policy.threshold - offset, policy.high, policy.low)
    if isinstance(policy, AffineMonotone):
        return AffineMonotone(policy.base + policy.slope * offset, policy.slope)
    return policy


def _signal_jumps(policy: SamplingPolicy, lo: float, hi: float) -> list[float]:
    """Signals in ``[lo, hi]`` where the emitted sample size can jump."""
    if isinstance(policy, Step):
        return [policy.threshold] if lo <= policy.threshold <= hi else []
    if isinstance(policy, Constant) or policy.slope == 0:
        return []
    # jumps where base + slope*s crosses j + 0.5
    a, s = policy.base, policy.slope
    r0, r1 = sorted((a + s * lo, a + s * hi))
    j0, j1 = math.floor(r0 - 0.5), math.ceil(r1 - 0.5)
    if j1 - j0 > 100_000:
        raise ValueError("affine policy changes size too often for quadrature breakpoints")
    out = []
    for j in range(max(j0, 0), j1 + 1):
        sig = (j + 0.5 - a) / s
        if lo < sig < hi:
            out.append(sig)
    return out


def _breakpoints(policy, z_hi: float, belief_per_z: float, sign: float) -> list[float]:
    # signal = sign * belief_per_z * z for z in [0, z_hi]
    ends = sorted((0.0, sign * belief_per_z * z_hi))
    pts = [0.0, z_hi]
    for sig in _signal_jumps(policy, ends[0], ends[1]):
        pts.append(sig / (sign * belief_per_z))
    return pts


# --- Bayesian sign-flip integrals ------------------------------------------


def _flip_prob(k, policy, prior_variance, noise_variance, q, sign):
    _require_positive_int("k", k)
    if not (prior_variance > 0 and noise_variance > 0):
        raise ValueError("variances must be > 0")
    su, se = prior_variance, noise_variance
    shrink = su / (su + se / k)
    belief_per_z = shrink / k
    post_var = su * se / (k * su + se)
    sd_s1 = math.sqrt(k * k * su + k * se)
    z_hi = q.integration_halfwidth_in_sds * sd_s1

    def integrand(z):
        n = policy.sizes(sign * belief_per_z * z).astype(float)
        num = -z - n * z * belief_per_z
        den = np.sqrt(n * n * post_var + se * n)
        dens = np.exp(-0.5 * (z / sd_s1) ** 2) / (sd_s1 * math.sqrt(2.0 * math.pi))
        return special.ndtr(num / den) * 2.0 * dens

    res = integrate(
        integrand,
        _breakpoints(policy, z_hi, belief_per_z, sign),
        relative_tolerance=q.relative_tolerance,
        max_subdivisions=q.max_subdivisions,
    )
    return res.value


def flip_prob_pos_to_neg(
    k: int,
    policy: SamplingPolicy,
    prior_variance: float,
    noise_variance: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> float:
    """P(posterior mean turns negative | it was positive after period one), prior mean 0."""
    return _flip_prob(k, policy, prior_variance, noise_variance, q, 1.0)


def flip_prob_neg_to_pos(
    k: int,
    policy: SamplingPolicy,
    prior_variance: float,
    noise_variance: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
) -> float:
    """P(posterior mean turns positive | it was negative after period one), prior mean 0."""
    return _flip_prob(k, policy, prior_variance, noise_variance, q, -1.0)


def bayes_prob_final_negative(
    k: int,
    policy: SamplingPolicy,
    prior_variance: float,
    noise_variance: float,
    q: QuadratureSettings = DEFAULT_QUADRATURE,
    prior_mean: float = 0.0,
) -> float:
    """P(final posterior mean < prior mean).

    A non-zero ``prior_mean`` is handled by shifting the policy so that it
    sees the centred belief.
    """
    if prior_mean:
        policy = shift_policy(policy, prior_mean)
    pos_neg = flip_prob_pos_to_neg(k, policy, prior_variance, noise_variance, q)
    neg_pos = flip_prob_neg_to_pos(k, policy, prior_variance, noise_variance, q)
    return 0.5 * pos_neg + 0.5 * (1.0 - neg_pos)


# --- averaging learner, any policy, normal payoffs --------------------------


def _averaging_integral(k, policy, sigma, q, kernel):
    _require_positive_int("k", k)
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    sd_s1 = sigma * math.sqrt(k)
    z_hi = q.integration_halfwidth_in_sds * sd_s1

    def integrand(z):
        n = policy.sizes(z / k).astype(float)
        dens = np.exp(-0.5 * (z / sd_s1) ** 2) / (sd_s1 * math.sqrt(2.0 * math.pi))
        return kernel(z, n) * dens

    pts = [-z_hi, z_hi] + [s * k for s in _signal_jumps(policy, -z_hi / k, z_hi / k)]
    return integrate(
        integrand, pts, relative_tolerance=q.relative_tolerance,
        max_subdivisions=q.max_subdivisions,
    ).value


def averaging_expected_final(
    k: int, policy: SamplingPolicy, sigma: float, q: QuadratureSettings = DEFAULT_QUADRATURE
) -> float:
    """E[final average] for N(0, sigma^2) payoffs, by quadrature over the first-period sum."""
    return _averaging_integral(k, policy, sigma, q, lambda z, n: z / (k + n))


def averaging_prob_final_below(
    k: int, policy: SamplingPolicy, sigma: float, q: QuadratureSettings = DEFAULT_QUADRATURE
) -> float:
    """P(final average < 0) for N(0, sigma^2) payoffs (true mean 0)."""
    return _averaging_integral(
        k, policy, sigma, q, lambda z, n: special.ndtr(-z / (sigma * np.sqrt(n)))
    )


__all__ = [
    "DEFAULT_QUADRATURE",
    "averaging_expected_final",
    "averaging_prob_final_below",
    "bayes_prob_final_negative",
    "conditional_final_average",
    "flip_prob_neg_to_pos",
    "flip_prob_pos_to_neg",
    "normal_sum_tail_prob",
    "recency_conditional_expectation",
    "shift_policy",
    "std_normal_cdf",
    "step_policy_bias_closed_form",
]
