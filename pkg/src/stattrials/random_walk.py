"""One-dimensional symmetric random walk ensembles.

Each step is +1 or -1 with equal probability, so the final coordinate
satisfies E[z_N] = 0 and E[z_N**2] = N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import rng as _rng
from ._parallel import run_chunked
from .stats import summarize


@dataclass(frozen=True)
class WalkConfig:
    steps: int
    trials: int
    seed: int = 1

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError(f"steps must be nonnegative, got {self.steps}")
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")


@dataclass
class WalkEnsembleResult:
    steps: int
    final_positions: np.ndarray
    msd: float
    msd_stderr: float

    @property
    def trials(self) -> int:
        return int(self.final_positions.size)


def walk_once(state: _rng.RngState, steps: int) -> int:
    z = 0
    for _ in range(steps):
        z += 1 if state.bernoulli(0.5) else -1
    return z


@njit(cache=True, nogil=True)
def _walk_kernel(root, offset, steps, start, stop, out):
    ring = np.empty(_rng.RING, dtype=np.uint32)
    pos = np.empty(2, dtype=np.int64)
    for t in range(start, stop):
        _rng.seed_ring(_rng.derive_seed(root, np.uint64(offset + t)), ring, pos)
        z = 0
        for _ in range(steps):
            if _rng.next_uniform_k(ring, pos) < 0.5:
                z += 1
            else:
                z -= 1
        out[t] = z


def final_positions(steps: int, trials: int, seed: int, offset: int = 0, threads: int = 1) -> np.ndarray:
    """z_N of trials ``offset .. offset+trials-1``, one substream each."""
    out = np.empty(trials, dtype=np.int64)
    root = np.uint64(seed)

    def call(lo, hi):
        _walk_kernel(root, offset, steps, lo, hi, out)

    run_chunked(call, trials, threads)
    return out


def ensemble(config: WalkConfig, offset: int = 0, threads: int = 1) -> WalkEnsembleResult:
    """Run ``config.trials`` independent walks and measure the mean square displacement.

    Trial ``i`` draws from substream ``(seed, offset + i)``; the result does not
    depend on ``threads``.
    """
    z = final_positions(config.steps, config.trials, config.seed, offset, threads)
    sq = summarize(z.astype(np.float64) ** 2)
    return WalkEnsembleResult(config.steps, z, sq.mean, sq.stderr)


def msd_curve(steps_values, trials: int, seed: int = 1, threads: int = 1) -> list[tuple[int, float, float]]:
    """(N, msd, msd_stderr) for each N, each on its own block of substreams."""
    steps_values = [int(n) for n in steps_values]
    if not steps_values:
        raise ValueError("msd_curve needs at least one step count")
    if any(n < 1 for n in steps_values):
        raise ValueError("step counts must be positive")
    rows = []
    for k, n in enumerate(steps_values):
        res = ensemble(WalkConfig(n, trials, seed), offset=k * trials, threads=threads)
        rows.append((n, res.msd, res.msd_stderr))
    return rows


def fit_line(x, y) -> tuple[float, float]:
    """Ordinary least-squares (slope, intercept)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)


def binomial_pmf(steps: int) -> dict[int, float]:
    """Exact law of z_N: z = 2k - N with k ~ Binomial(N, 1/2)."""
    return {2 * k - steps: math.comb(steps, k) / 2.0**steps for k in range(steps + 1)}
