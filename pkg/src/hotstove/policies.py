"""Second-period sample-size policies ``n(signal)``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

MAX_SAMPLE_SIZE = 2**31 - 1


class Monotonicity(str, Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    CONSTANT = "constant"


def _check_size(name: str, n: int) -> None:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise TypeError(f"{name} must be an integer, got {n!r}")
    if not 1 <= n <= MAX_SAMPLE_SIZE:
        raise ValueError(f"{name} must be in [1, 2**31), got {n!r}")


@dataclass(frozen=True)
class Step:
    """``high`` samples when the signal is strictly above ``threshold``, else ``low``."""

    threshold: float
    high: int
    low: int

    def __post_init__(self):
        if not math.isfinite(self.threshold):
            raise ValueError("threshold must be finite")
        _check_size("high", self.high)
        _check_size("low", self.low)

    def sizes(self, signals: np.ndarray) -> np.ndarray:
        return np.where(np.asarray(signals) > self.threshold, self.high, self.low).astype(np.int64)

    def support(self) -> tuple[int, ...]:
        return tuple(sorted({self.high, self.low}))


@dataclass(frozen=True)
class AffineMonotone:
    """``round(base + slope * signal)`` rounded half away from zero, clamped to ``[1, 2**31)``."""

    base: float
    slope: float

    def __post_init__(self):
        if not (math.isfinite(self.base) and math.isfinite(self.slope)):
            raise ValueError("base and slope must be finite")

    def sizes(self, signals: np.ndarray) -> np.ndarray:
        raw = self.base + self.slope * np.asarray(signals, dtype=float)
        rounded = np.sign(raw) * np.floor(np.abs(raw) + 0.5)
        return np.clip(rounded, 1, MAX_SAMPLE_SIZE).astype(np.int64)


@dataclass(frozen=True)
class Constant:
    n: int

    def __post_init__(self):
        _check_size("n", self.n)

    def sizes(self, signals: np.ndarray) -> np.ndarray:
        return np.full(np.shape(signals), self.n, dtype=np.int64)

    def support(self) -> tuple[int, ...]:
        return (self.n,)


SamplingPolicy = Union[Step, AffineMonotone, Constant]


def sample_size(policy: SamplingPolicy, signal: float) -> int:
    if not math.isfinite(signal):
        raise ValueError(f"signal must be finite, got {signal!r}")
    return int(policy.sizes(np.array([signal]))[0])


def sample_sizes(policy: SamplingPolicy, signals) -> np.ndarray:
    """Vectorized :func:`sample_size`."""
    return policy.sizes(np.asarray(signals, dtype=float))


def monotonicity_class(policy: SamplingPolicy) -> Monotonicity:
    if isinstance(policy, Step):
        diff = policy.high - policy.low
    elif isinstance(policy, AffineMonotone):
        diff = policy.slope
    elif isinstance(policy, Constant):
        diff = 0
    else:
        raise TypeError(f"unknown policy {policy!r}")
    if diff > 0:
        return Monotonicity.INCREASING
    if diff < 0:
        return Monotonicity.DECREASING
    return Monotonicity.CONSTANT


def max_sample_size(policy: SamplingPolicy, lo: float = -math.inf, hi: float = math.inf) -> int:
    """Largest size the policy can emit for signals in ``[lo, hi]``."""
    if isinstance(policy, (Step, Constant)):
        return max(policy.support())
    ends = [e for e in (lo, hi) if math.isfinite(e)]
    if len(ends) < 2 and policy.slope != 0:
        return MAX_SAMPLE_SIZE
    return int(max(policy.sizes(np.array(ends or [0.0]))))
