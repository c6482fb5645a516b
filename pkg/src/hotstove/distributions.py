"""Payoff distributions, environments, and normal-distribution helpers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Protocol, Union

import numpy as np
from scipy import special

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
PROB_TOL = 1e-12
# beyond this many standard deviations the Mills ratio switches to a continued fraction
MILLS_SWITCH = 8.0


class UniformSource(Protocol):
    def uniform(self) -> float: ...


def _check_finite(name: str, value: float) -> None:
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


def _check_positive(name: str, value: float) -> None:
    _check_finite(name, value)
    if value <= 0:
        raise ValueError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class Normal:
    mean: float = 0.0
    variance: float = 1.0

    def __post_init__(self):
        _check_finite("mean", self.mean)
        _check_positive("variance", self.variance)

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    def ppf(self, u):
        return self.mean + self.sd * special.ndtri(u)


@dataclass(frozen=True)
class Laplace:
    mean: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        _check_finite("mean", self.mean)
        _check_positive("scale", self.scale)

    @property
    def variance(self) -> float:
        return 2.0 * self.scale**2

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        d = u - 0.5
        out = self.mean - self.scale * np.sign(d) * np.log1p(-2.0 * np.abs(d))
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class FiniteDiscrete:
    """Arbitrary finite support given as ``(value, probability)`` pairs."""

    support: tuple[tuple[float, float], ...]
    _values: np.ndarray = field(init=False, repr=False, compare=False)
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = tuple((float(v), float(p)) for v, p in self.support)
        if not pairs:
            raise ValueError("support must not be empty")
        for v, p in pairs:
            _check_finite("support value", v)
            if not (0.0 < p <= 1.0):
                raise ValueError(f"probability must be in (0, 1], got {p!r}")
        values = [v for v, _ in pairs]
        if len(set(values)) != len(values):
            raise ValueError("support values must be distinct")
        total = math.fsum(p for _, p in pairs)
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        object.__setattr__(self, "support", pairs)
        cum = np.cumsum([p for _, p in pairs])
        cum[-1] = 1.0
        object.__setattr__(self, "_values", np.array(values))
        object.__setattr__(self, "_cum", cum)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for v, _ in self.support)

    @property
    def probabilities(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.support)

    @property
    def mean(self) -> float:
        return math.fsum(v * p for v, p in self.support)

    @property
    def variance(self) -> float:
        mu = self.mean
        return math.fsum(p * (v - mu) ** 2 for v, p in self.support)

    def ppf(self, u):
        idx = np.searchsorted(self._cum, u, side="right")
        idx = np.minimum(idx, len(self._cum) - 1)
        out = self._values[idx]
        return out if np.ndim(out) else float(out)

    def as_finite(self) -> FiniteDiscrete:
        return self


@dataclass(frozen=True)
class DiscreteSymmetric:
    """Mirrored discrete distribution: each offset ``+a`` and ``-a`` gets the same probability."""

    center: float
    offsets: tuple[tuple[float, float], ...]
    _finite: FiniteDiscrete = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        _check_finite("center", self.center)
        offsets = tuple((float(a), float(p)) for a, p in self.offsets)
        if any(a == 0 for a, _ in offsets):
            raise ValueError("offsets must be non-zero")
        if len({abs(a) for a, _ in offsets}) != len(offsets):
            raise ValueError("offset magnitudes must be distinct")
        support = []
        for a, p in sorted(offsets, key=lambda t: abs(t[0])):
            a = abs(a)
            support.append((self.center - a, p))
            support.append((self.center + a, p))
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "_finite", FiniteDiscrete(tuple(sorted(support))))

    @property
    def mean(self) -> float:
        return self.center

    @property
    def variance(self) -> float:
        return self._finite.variance

    @property
    def support(self) -> tuple[tuple[float, float], ...]:
        return self._finite.support

    def ppf(self, u):
        return self._finite.ppf(u)

    def as_finite(self) -> FiniteDiscrete:
        return self._finite


PayoffDistribution = Union[Normal, Laplace, DiscreteSymmetric, FiniteDiscrete]


def sample(dist: PayoffDistribution, rng: UniformSource) -> float:
    """One draw from ``dist`` by inversion of a single uniform from ``rng``."""
    return float(dist.ppf(rng.uniform()))


@dataclass(frozen=True)
class FixedMean:
    payoff: PayoffDistribution

    @property
    def mean(self) -> float:
        return self.payoff.mean


@dataclass(frozen=True)
class HierarchicalNormal:
    """Per-trial true mean ``u_i ~ N(prior_mean, prior_variance)``; payoffs ``u_i + N(0, noise_variance)``."""

    prior_mean: float = 0.0
    prior_variance: float = 1.0
    noise_variance: float = 1.0

    def __post_init__(self):
        _check_finite("prior_mean", self.prior_mean)
        _check_positive("prior_variance", self.prior_variance)
        _check_positive("noise_variance", self.noise_variance)

    @property
    def mean(self) -> float:
        return self.prior_mean


EnvironmentSpec = Union[FixedMean, HierarchicalNormal]


# --- normal helpers --------------------------------------------------------


def normal_pdf(x: float, mean: float = 0.0, variance: float = 1.0) -> float:
    _check_positive("variance", variance)
    sd = math.sqrt(variance)
    z = (x - mean) / sd
    return INV_SQRT_2PI * math.exp(-0.5 * z * z) / sd


def normal_cdf(x: float, mean: float = 0.0, variance: float = 1.0) -> float:
    _check_positive("variance", variance)
    z = (x - mean) / math.sqrt(variance)
    # erfc keeps full relative accuracy in the lower tail
    return 0.5 * math.erfc(-z / SQRT2)


def std_normal_cdf(z: float) -> float:
    return 0.5 * math.erfc(-z / SQRT2)


def _mills_cf(a: float, terms: int = 60) -> float:
    """Upper-tail Mills ratio Q(a)/phi(a) for large positive ``a`` (continued fraction)."""
    acc = a
    for j in range(terms, 0, -1):
        acc = a + j / acc
    return 1.0 / acc


def inverse_mills_upper(a: float) -> float:
    """phi(a) / (1 - Phi(a))."""
    if a > MILLS_SWITCH:
        return 1.0 / _mills_cf(a)
    q = 0.5 * math.erfc(a / SQRT2)
    return INV_SQRT_2PI * math.exp(-0.5 * a * a) / q


def truncated_normal_mean_above(c: float, sd: float) -> float:
    """E[X | X > c] for X ~ N(0, sd^2)."""
    _check_positive("sd", sd)
    _check_finite("c", c)
    return sd * inverse_mills_upper(c / sd)


def truncated_normal_mean_below(c: float, sd: float) -> float:
    """E[X | X < c] for X ~ N(0, sd^2)."""
    _check_positive("sd", sd)
    _check_finite("c", c)
    return -sd * inverse_mills_upper(-c / sd)
