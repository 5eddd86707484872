"""Multi-step process where a failed operation is repeated until it succeeds.

Operation ``i`` takes ``tau_i`` per attempt and succeeds with probability
``p_i``, so its attempt count is geometric and the total time has mean
sum(tau/p) and variance sum(tau**2 (1-p) / p**2).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from . import rng as _rng
from ._parallel import run_chunked
from .errors import RunawayError
from .stats import SummaryStats, summarize

MAX_ATTEMPTS = 10_000_000

DEFAULT_DURATIONS = (1.6, 2.7, 1.4, 3.8, 2.6)
DEFAULT_SUCCESS_PROBS = (0.6, 0.7, 0.4, 0.8, 0.6)


@dataclass(frozen=True)
class ProcessSpec:
    durations: tuple[float, ...] = DEFAULT_DURATIONS
    success_probs: tuple[float, ...] = DEFAULT_SUCCESS_PROBS

    def __post_init__(self):
        object.__setattr__(self, "durations", tuple(float(t) for t in self.durations))
        object.__setattr__(self, "success_probs", tuple(float(p) for p in self.success_probs))
        if not self.durations or len(self.durations) != len(self.success_probs):
            raise ValueError("durations and success_probs must be nonempty and of equal length")
        if any(t <= 0 for t in self.durations):
            raise ValueError("durations must be positive")
        if any(not 0.0 < p <= 1.0 for p in self.success_probs):
            raise ValueError("success probabilities must lie in (0, 1]")


@njit(cache=True, nogil=True)
def _attempts(ring, pos, probs, cap, counts):
    """Fill ``counts`` with attempts per operation; False if the cap was hit."""
    for i in range(probs.shape[0]):
        k = 0
        while True:
            k += 1
            if _rng.next_uniform_k(ring, pos) < probs[i]:
                break
            if k >= cap:
                counts[i] = k
                return False
        counts[i] = k
    return True


@njit(cache=True, nogil=True)
def _trials_kernel(root, taus, probs, cap, start, stop, totals, status):
    ring = np.empty(_rng.RING, dtype=np.uint32)
    pos = np.empty(2, dtype=np.int64)
    counts = np.empty(probs.shape[0], dtype=np.int64)
    for t in range(start, stop):
        _rng.seed_ring(_rng.derive_seed(root, np.uint64(t)), ring, pos)
        ok = _attempts(ring, pos, probs, cap, counts)
        total = 0.0
        for i in range(taus.shape[0]):
            total += counts[i] * taus[i]
        totals[t] = total
        status[t] = ok


def run_once_counts(spec: ProcessSpec, state: _rng.RngState, max_attempts: int = MAX_ATTEMPTS) -> np.ndarray:
    """Attempts needed by each operation in one run."""
    counts = np.empty(len(spec.success_probs), dtype=np.int64)
    probs = np.asarray(spec.success_probs)
    if not _attempts(state.ring, state.pos, probs, max_attempts, counts):
        raise RunawayError(f"an operation exceeded {max_attempts} attempts")
    return counts


def run_once(spec: ProcessSpec, state: _rng.RngState, max_attempts: int = MAX_ATTEMPTS) -> float:
    counts = run_once_counts(spec, state, max_attempts)
    total = 0.0
    for k, tau in zip(counts, spec.durations):
        total += int(k) * tau
    return total


def analytic_moments(spec: ProcessSpec) -> tuple[float, float]:
    mean = sum(t / p for t, p in zip(spec.durations, spec.success_probs))
    var = sum(t * t * (1.0 - p) / (p * p) for t, p in zip(spec.durations, spec.success_probs))
    return mean, var


def totals(spec: ProcessSpec, trials: int, seed: int = 1, threads: int = 1,
           max_attempts: int = MAX_ATTEMPTS) -> np.ndarray:
    """Total time of each trial; trial ``i`` uses substream ``(seed, i)``."""
    if trials < 1:
        raise ValueError("trials must be positive")
    taus = np.asarray(spec.durations)
    probs = np.asarray(spec.success_probs)
    out = np.empty(trials)
    status = np.empty(trials, dtype=np.bool_)
    root = np.uint64(seed)

    def call(lo, hi):
        _trials_kernel(root, taus, probs, max_attempts, lo, hi, out, status)

    run_chunked(call, trials, threads)
    if not status.all():
        bad = int(np.flatnonzero(~status)[0])
        raise RunawayError(f"trial {bad}: an operation exceeded {max_attempts} attempts")
    return out


def estimate(spec: ProcessSpec, trials: int, seed: int = 1, threads: int = 1) -> SummaryStats:
    if trials < 2:
        raise ValueError("estimate needs at least 2 trials")
    return summarize(totals(spec, trials, seed, threads))
