"""Histograms, summary statistics and a stability detector for running estimates."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from numba import njit


@dataclass(frozen=True)
class SummaryStats:
    """Sample size, mean and unbiased (n-1) variance of a sample.

    For ``n == 1`` the variance, std and stderr are reported as 0.
    """

    n: int
    mean: float
    variance: float
    std: float
    stderr: float

    @classmethod
    def from_moments(cls, n: int, mean: float, m2: float) -> "SummaryStats":
        """Build from the count, mean and the sum of squared deviations ``m2``."""
        variance = max(m2, 0.0) / (n - 1) if n > 1 else 0.0
        std = math.sqrt(variance)
        return cls(n, mean, variance, std, std / math.sqrt(n))

    @property
    def m2(self) -> float:
        return self.variance * (self.n - 1)


@njit(cache=True)
def _welford(x):
    mean = 0.0
    m2 = 0.0
    for i in range(x.shape[0]):
        d = x[i] - mean
        mean += d / (i + 1)
        m2 += d * (x[i] - mean)
    return mean, m2


def summarize(samples) -> SummaryStats:
    """Single-pass (Welford) mean and unbiased variance."""
    x = np.ascontiguousarray(samples, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError("cannot summarize an empty sample")
    mean, m2 = _welford(x)
    return SummaryStats.from_moments(int(x.size), float(mean), float(m2))


def merge(a: SummaryStats, b: SummaryStats) -> SummaryStats:
    """Combine the statistics of two disjoint samples.

    Uses the pairwise update of Chan, Golub and LeVeque on (n, mean, m2);
    the result equals ``summarize`` of the concatenated samples up to
    round-off and does not depend on which side is ``a``.
    """
    n = a.n + b.n
    delta = b.mean - a.mean
    mean = a.mean + delta * b.n / n
    m2 = a.m2 + b.m2 + delta * delta * a.n * b.n / n
    return SummaryStats.from_moments(n, mean, m2)


@dataclass
class Histogram:
    """Counts over ``bins`` half-open bins spanning [lo, hi)."""

    lo: float
    hi: float
    bins: int
    counts: np.ndarray
    underflow: int = 0
    overflow: int = 0

    @property
    def width(self) -> float:
        return (self.hi - self.lo) / self.bins

    @property
    def edges(self) -> np.ndarray:
        return self.lo + self.width * np.arange(self.bins + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.lo + self.width * (np.arange(self.bins) + 0.5)

    @property
    def total(self) -> int:
        return int(self.counts.sum()) + self.underflow + self.overflow


def histogram(samples, lo: float, hi: float, bins: int) -> Histogram:
    if not lo < hi:
        raise ValueError(f"histogram needs lo < hi, got lo={lo}, hi={hi}")
    if int(bins) < 1:
        raise ValueError(f"bins must be positive, got {bins}")
    bins = int(bins)
    x = np.asarray(samples, dtype=np.float64).ravel()
    if np.isnan(x).any():
        raise ValueError("histogram samples contain NaN")
    width = (hi - lo) / bins
    under = x < lo
    over = x >= hi
    inside = x[~(under | over)]
    # float rounding can push a value just below hi into index `bins`
    idx = np.minimum(((inside - lo) / width).astype(np.int64), bins - 1)
    counts = np.bincount(idx, minlength=bins).astype(np.int64)
    return Histogram(float(lo), float(hi), bins, counts, int(under.sum()), int(over.sum()))


@dataclass
class StabilityTracker:
    """Flags a running estimate as stable once it stops wandering.

    Stable means: over the last ``window`` estimates, max - min is at most
    ``tolerance * max(1, |latest|)``.
    """

    window: int = 200
    tolerance: float = 0.02
    history: deque = field(default=None, repr=False)

    def __post_init__(self):
        if self.window < 2:
            raise ValueError("stability window must be at least 2")
        if self.tolerance <= 0:
            raise ValueError("stability tolerance must be positive")
        self.history = deque(maxlen=self.window)

    def push(self, estimate: float) -> bool:
        self.history.append(float(estimate))
        if len(self.history) < self.window:
            return False
        spread = max(self.history) - min(self.history)
        return spread <= self.tolerance * max(1.0, abs(estimate))


def stability_reached(tracker: StabilityTracker, next_estimate: float) -> bool:
    return tracker.push(next_estimate)


def first_stable_index(estimates, window: int = 200, tolerance: float = 0.02) -> int | None:
    """1-based position of the first estimate at which a fresh tracker reports stable."""
    tracker = StabilityTracker(window, tolerance)
    for n, value in enumerate(estimates, start=1):
        if tracker.push(value):
            return n
    return None
