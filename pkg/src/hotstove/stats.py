"""Mergeable summary statistics and fixed-bin histograms."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ReferenceMismatch(ValueError):
    pass


@dataclass(frozen=True)
class SummaryStats:
    """Count, mean and M2 of final beliefs plus counts strictly below/above ``reference``.

    Moments merge with Chan's pairwise update; counts merge exactly.
    """

    reference: float
    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    below: int = 0
    above: int = 0

    @classmethod
    def from_values(cls, values, reference: float) -> SummaryStats:
        x = np.asarray(values, dtype=float)
        if x.size == 0:
            return cls(reference)
        mean = float(x.mean())
        return cls(
            reference=reference,
            count=int(x.size),
            mean=mean,
            m2=float(np.sum((x - mean) ** 2)),
            below=int(np.count_nonzero(x < reference)),
            above=int(np.count_nonzero(x > reference)),
        )

    def merge(self, other: SummaryStats) -> SummaryStats:
        if self.reference != other.reference:
            raise ReferenceMismatch(
                f"cannot merge summaries with references {self.reference!r} and {other.reference!r}"
            )
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        n = self.count + other.count
        delta = other.mean - self.mean
        return SummaryStats(
            reference=self.reference,
            count=n,
            mean=self.mean + delta * other.count / n,
            m2=self.m2 + other.m2 + delta * delta * self.count * other.count / n,
            below=self.below + other.below,
            above=self.above + other.above,
        )

    __add__ = merge

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else math.nan

    @property
    def se_mean(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count > 1 else math.nan

    @property
    def prob_below_reference(self) -> float:
        return self.below / self.count if self.count else math.nan

    @property
    def prob_above_reference(self) -> float:
        return self.above / self.count if self.count else math.nan

    @staticmethod
    def _se(p: float, n: int) -> float:
        return math.sqrt(p * (1.0 - p) / n) if n else math.nan

    @property
    def se_prob_below(self) -> float:
        return self._se(self.prob_below_reference, self.count)

    @property
    def se_prob_above(self) -> float:
        return self._se(self.prob_above_reference, self.count)


def merge(a: SummaryStats, b: SummaryStats) -> SummaryStats:
    return a.merge(b)


@dataclass(frozen=True)
class HistogramBins:
    count: int
    min: float
    max: float

    def __post_init__(self):
        if self.count < 2:
            raise ValueError("histogram needs at least 2 bins")
        if not (math.isfinite(self.min) and math.isfinite(self.max) and self.min < self.max):
            raise ValueError("histogram range must be finite with min < max")

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count + 1)


@dataclass(frozen=True)
class Histogram:
    """Uniform bins, left-closed and right-open; out-of-range values go to under/overflow."""

    bins: HistogramBins
    counts: np.ndarray = field(compare=False)
    underflow: int = 0
    overflow: int = 0

    @classmethod
    def empty(cls, bins: HistogramBins) -> Histogram:
        return cls(bins, np.zeros(bins.count, dtype=np.int64))

    @classmethod
    def from_values(cls, values, bins: HistogramBins) -> Histogram:
        x = np.asarray(values, dtype=float)
        idx = np.searchsorted(bins.edges, x, side="right") - 1
        under = int(np.count_nonzero(idx < 0))
        over = int(np.count_nonzero(idx >= bins.count))
        inside = idx[(idx >= 0) & (idx < bins.count)]
        return cls(bins, np.bincount(inside, minlength=bins.count).astype(np.int64), under, over)

    def merge(self, other: Histogram) -> Histogram:
        if self.bins != other.bins:
            raise ValueError("cannot merge histograms with different bins")
        return Histogram(
            self.bins,
            self.counts + other.counts,
            self.underflow + other.underflow,
            self.overflow + other.overflow,
        )

    __add__ = merge

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Histogram)
            and self.bins == other.bins
            and np.array_equal(self.counts, other.counts)
            and (self.underflow, self.overflow) == (other.underflow, other.overflow)
        )

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.underflow + self.overflow

    @property
    def edges(self) -> np.ndarray:
        return self.bins.edges

    def mass_below(self, x: float) -> float:
        """Fraction of values below ``x``; exact when ``x`` is a bin edge."""
        edges = self.edges
        if x <= edges[0]:
            return self.underflow / self.total
        if x >= edges[-1]:
            return (self.total - self.overflow) / self.total
        i = int(np.searchsorted(edges, x, side="right") - 1)
        frac = (x - edges[i]) / (edges[i + 1] - edges[i])
        below = self.underflow + int(self.counts[:i].sum()) + frac * self.counts[i]
        return float(below / self.total)

    def median(self) -> float:
        """Median by linear interpolation inside the bin that crosses half the mass."""
        half = 0.5 * self.total
        if self.underflow >= half:
            return -math.inf
        cum = self.underflow + np.cumsum(self.counts)
        i = int(np.searchsorted(cum, half, side="left"))
        if i >= self.bins.count:
            return math.inf
        before = cum[i] - self.counts[i]
        edges = self.edges
        return float(edges[i] + (half - before) / self.counts[i] * (edges[i + 1] - edges[i]))

    def mean(self) -> float:
        """Mean of bin midpoints (in-range values only)."""
        mids = 0.5 * (self.edges[:-1] + self.edges[1:])
        n = self.counts.sum()
        return float(mids @ self.counts / n) if n else math.nan

    def rows(self):
        """``(bin_left, bin_right, count)`` rows, with under/overflow as infinite-edged rows."""
        edges = self.edges
        yield (-math.inf, float(edges[0]), self.underflow)
        for i, c in enumerate(self.counts):
            yield (float(edges[i]), float(edges[i + 1]), int(c))
        yield (float(edges[-1]), math.inf, self.overflow)


def build_histogram(outcomes, bins: HistogramBins) -> Histogram:
    """Histogram of final beliefs from TrialOutcomes, floats, or an array."""
    if isinstance(outcomes, np.ndarray):
        return Histogram.from_values(outcomes, bins)
    values = [getattr(o, "final_belief", o) for o in outcomes]
    return Histogram.from_values(np.asarray(values, dtype=float), bins)
