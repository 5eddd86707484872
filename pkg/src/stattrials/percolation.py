"""Site percolation on an M x M grid between a top and a bottom electrode.

Cells are occupied independently with probability p; occupied cells sharing
an edge (4-neighbourhood) belong to the same cluster.  A grid percolates
when one cluster touches both row 0 and row M-1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import rng as _rng
from ._parallel import run_chunked


@dataclass
class Grid:
    occupied: np.ndarray

    @property
    def M(self) -> int:
        return self.occupied.shape[0]

    def dump(self) -> str:
        return "\n".join("".join("1" if c else "0" for c in row) for row in self.occupied)


@dataclass
class ClusterLabeling:
    labels: np.ndarray
    cluster_count: int

    def dump(self) -> str:
        return "\n".join(" ".join(str(int(v)) for v in row) for row in self.labels)


@dataclass
class PercolationCurve:
    M: int
    points: list  # (p, P, stderr, trials)


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _find(parent, i):
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


@njit(cache=True, nogil=True)
def _union(parent, i, j):
    ri = _find(parent, i)
    rj = _find(parent, j)
    if ri != rj:
        # keep the smaller index as root
        if ri < rj:
            parent[rj] = ri
        else:
            parent[ri] = rj


@njit(cache=True, nogil=True)
def _label_kernel(occ, labels):
    M = occ.shape[0]
    n = M * M
    parent = np.arange(n)
    for r in range(M):
        for c in range(M):
            if occ[r, c]:
                i = r * M + c
                if r > 0 and occ[r - 1, c]:
                    _union(parent, i, i - M)
                if c > 0 and occ[r, c - 1]:
                    _union(parent, i, i - 1)
    canon = np.zeros(n, dtype=np.int64)
    count = 0
    for r in range(M):
        for c in range(M):
            if occ[r, c]:
                root = _find(parent, r * M + c)
                if canon[root] == 0:
                    count += 1
                    canon[root] = count
                labels[r, c] = canon[root]
            else:
                labels[r, c] = 0
    return count


@njit(cache=True, nogil=True)
def _spans(labels, count):
    M = labels.shape[0]
    top = np.zeros(count + 1, dtype=np.bool_)
    for c in range(M):
        if labels[0, c] > 0:
            top[labels[0, c]] = True
    for c in range(M):
        if labels[M - 1, c] > 0 and top[labels[M - 1, c]]:
            return True
    return False


@njit(cache=True, nogil=True)
def _fill_grid(ring, pos, p, occ):
    M = occ.shape[0]
    for r in range(M):
        for c in range(M):
            occ[r, c] = _rng.next_uniform_k(ring, pos) < p


@njit(cache=True, nogil=True)
def _span_trials(root, offset, M, p, start, stop, out):
    ring = np.empty(_rng.RING, dtype=np.uint32)
    pos = np.empty(2, dtype=np.int64)
    occ = np.empty((M, M), dtype=np.bool_)
    labels = np.empty((M, M), dtype=np.int64)
    for t in range(start, stop):
        _rng.seed_ring(_rng.derive_seed(root, np.uint64(offset + t)), ring, pos)
        _fill_grid(ring, pos, p, occ)
        count = _label_kernel(occ, labels)
        out[t] = _spans(labels, count)


# --------------------------------------------------------------------------
# public API
# --------------------------------------------------------------------------

def _check_p(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"occupation probability must lie in [0, 1], got {p}")
    return float(p)


def generate_grid(M: int, p: float, state: _rng.RngState) -> Grid:
    """Occupy each cell with probability ``p``, drawing in row-major order."""
    if M < 1:
        raise ValueError(f"grid side must be positive, got {M}")
    p = _check_p(p)
    occ = np.empty((M, M), dtype=np.bool_)
    _fill_grid(state.ring, state.pos, p, occ)
    return Grid(occ)


def label_clusters(grid: Grid | np.ndarray) -> ClusterLabeling:
    """Union-find labelling, renumbered 1..k in row-major first-encounter order."""
    occ = grid.occupied if isinstance(grid, Grid) else grid
    occ = np.ascontiguousarray(occ, dtype=np.bool_)
    labels = np.empty(occ.shape, dtype=np.int64)
    count = _label_kernel(occ, labels)
    return ClusterLabeling(labels, int(count))


def has_spanning_cluster(labeling: ClusterLabeling) -> bool:
    return bool(_spans(labeling.labels, labeling.cluster_count))


def spanning_flags(M: int, p: float, trials: int, seed: int, offset: int = 0, threads: int = 1) -> np.ndarray:
    """Spanning outcome of trials ``offset .. offset+trials-1``, one substream each."""
    if M < 1:
        raise ValueError(f"grid side must be positive, got {M}")
    if trials < 1:
        raise ValueError("trials must be positive")
    p = _check_p(p)
    out = np.empty(trials, dtype=np.bool_)
    root = np.uint64(seed)

    def call(lo, hi):
        _span_trials(root, offset, M, p, lo, hi, out)

    run_chunked(call, trials, threads, min_chunk=32)
    return out


def estimate_P(M: int, p: float, trials: int, seed: int = 1, offset: int = 0, threads: int = 1) -> tuple[float, float]:
    """Fraction of spanning grids and its binomial standard error."""
    hits = int(spanning_flags(M, p, trials, seed, offset, threads).sum())
    P = hits / trials
    return P, math.sqrt(P * (1.0 - P) / trials)


def sweep_P(M: int, p_list, trials: int, seed: int = 1, threads: int = 1) -> PercolationCurve:
    """P(p) over ``p_list``; point ``k`` uses substreams ``k*trials ..``."""
    p_list = [float(p) for p in p_list]
    if not p_list:
        raise ValueError("sweep_P needs at least one p")
    points = []
    for k, p in enumerate(p_list):
        P, se = estimate_P(M, p, trials, seed, offset=k * trials, threads=threads)
        points.append((p, P, se, trials))
    return PercolationCurve(M, points)


def crossing_point(curve: PercolationCurve, level: float = 0.5) -> float:
    """p where the curve first reaches ``level``, by linear interpolation."""
    pts = curve.points
    for (p0, P0, *_), (p1, P1, *_) in zip(pts, pts[1:]):
        if P0 < level <= P1:
            return p0 + (level - P0) * (p1 - p0) / (P1 - P0)
    raise ValueError(f"curve never crosses P={level}")

