"""Additive lagged-Fibonacci uniform source.

The generator keeps a ring of 55 unsigned 32-bit words and produces

    x[n] = (x[n-24] + x[n-55]) mod 2**32

The ring is filled from a 64-bit LCG expansion of the seed and then warmed
up by discarding 550 outputs.  Every random quantity in the package is drawn
from this generator, so a seed fully determines every experiment.

Bulk work (ensembles with one substream per trial) happens inside the
``numba`` kernels below; :class:`RngState` wraps the same kernels for
one-draw-at-a-time use, so both paths emit the same stream.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

RING = 55
SHORT_LAG = 24
WARMUP = 550

_LCG_MULT = np.uint64(6364136223846793005)
_LCG_INC = np.uint64(1442695040888963407)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_SHIFT33 = np.uint64(33)
_TWO_M32 = 1.0 / 4294967296.0
_U64_MAX = (1 << 64) - 1


# --------------------------------------------------------------------------
# kernels (shared by the object API and by the ensemble kernels elsewhere)
# --------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def next_word(ring, pos):
    """Advance the ring by one step and return the new 32-bit word.

    ``pos[0]`` is the slot of x[n-55] (overwritten), ``pos[1]`` of x[n-24].
    """
    a = pos[0]
    b = pos[1]
    w = (np.uint64(ring[a]) + np.uint64(ring[b])) & _MASK32
    ring[a] = np.uint32(w)
    a += 1
    if a == RING:
        a = 0
    b += 1
    if b == RING:
        b = 0
    pos[0] = a
    pos[1] = b
    return w


@njit(cache=True, nogil=True)
def next_uniform_k(ring, pos):
    return float(next_word(ring, pos)) * _TWO_M32


@njit(cache=True, nogil=True)
def next_quantized_k(ring, pos, q):
    # floor(word * q / 2**32); exact for q < 2**32
    w = next_word(ring, pos)
    k = (w * np.uint64(q)) >> _SHIFT32
    return float(k) / float(q)


@njit(cache=True, nogil=True)
def seed_ring(seed, ring, pos):
    """Fill ``ring`` from ``seed`` and run the warm-up."""
    s = np.uint64(seed)
    while True:
        nonzero = False
        for i in range(RING):
            s = s * _LCG_MULT + _LCG_INC
            ring[i] = np.uint32(s >> _SHIFT32)
            if ring[i] != 0:
                nonzero = True
        if nonzero:
            break
        # all-zero ring is a fixed point of the recurrence
        seed = np.uint64(seed) + np.uint64(1)
        s = np.uint64(seed)
    pos[0] = 0
    pos[1] = RING - SHORT_LAG
    for _ in range(WARMUP):
        next_word(ring, pos)


@njit(cache=True, nogil=True)
def derive_seed(root_seed, stream_index):
    """Map (root, index) to a seed; a bijection in ``stream_index``."""
    z = np.uint64(root_seed) ^ (np.uint64(stream_index) * _GOLDEN)
    for _ in range(2):
        z = z * _LCG_MULT + _LCG_INC
        z ^= z >> _SHIFT33
    return z


@njit(cache=True, nogil=True)
def fill_uniform(ring, pos, out):
    for i in range(out.shape[0]):
        out[i] = float(next_word(ring, pos)) * _TWO_M32


@njit(cache=True, nogil=True)
def fill_quantized(ring, pos, q, out):
    for i in range(out.shape[0]):
        out[i] = next_quantized_k(ring, pos, q)


@njit(cache=True, nogil=True)
def fill_words(ring, pos, out):
    for i in range(out.shape[0]):
        out[i] = next_word(ring, pos)


def _check_u64(name: str, value: int) -> int:
    value = int(value)
    if not 0 <= value <= _U64_MAX:
        raise ValueError(f"{name} must be an unsigned 64-bit integer, got {value}")
    return value


# --------------------------------------------------------------------------
# object API
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class StreamId:
    """Names one private substream: ``stream_index`` under ``root_seed``."""

    root_seed: int
    stream_index: int


class RngState:
    """Single-owner lagged-Fibonacci generator state.

    Not safe to share between threads; use :func:`derive_stream` to give each
    worker its own state.
    """

    __slots__ = ("ring", "pos", "seed")

    def __init__(self, seed: int = 0):
        self.seed = _check_u64("seed", seed)
        self.ring = np.empty(RING, dtype=np.uint32)
        self.pos = np.empty(2, dtype=np.int64)
        seed_ring(np.uint64(self.seed), self.ring, self.pos)

    @property
    def index_a(self) -> int:
        return int(self.pos[0])

    @property
    def index_b(self) -> int:
        return int(self.pos[1])

    def copy(self) -> "RngState":
        other = RngState.__new__(RngState)
        other.seed = self.seed
        other.ring = self.ring.copy()
        other.pos = self.pos.copy()
        return other

    def next_word(self) -> int:
        return int(next_word(self.ring, self.pos))

    def next_uniform(self) -> float:
        """Uniform real in [0, 1) with 32-bit resolution."""
        return next_uniform_k(self.ring, self.pos)

    def next_uniform_quantized(self, q: int) -> float:
        """Uniform on the grid {0, 1/q, ..., (q-1)/q}."""
        q = _check_q(q)
        return next_quantized_k(self.ring, self.pos, q)

    def uniforms(self, n: int) -> np.ndarray:
        """Next ``n`` uniforms, identical to ``n`` calls of :meth:`next_uniform`."""
        out = np.empty(int(n), dtype=np.float64)
        fill_uniform(self.ring, self.pos, out)
        return out

    def quantized(self, n: int, q: int) -> np.ndarray:
        q = _check_q(q)
        out = np.empty(int(n), dtype=np.float64)
        fill_quantized(self.ring, self.pos, q, out)
        return out

    def words(self, n: int) -> np.ndarray:
        out = np.empty(int(n), dtype=np.uint64)
        fill_words(self.ring, self.pos, out)
        return out

    def bernoulli(self, p: float) -> bool:
        return bernoulli(self, p)

    def choose_weighted(self, weights) -> int:
        return choose_weighted(self, weights)

    def __repr__(self) -> str:
        return f"RngState(seed={self.seed}, index_a={self.index_a}, index_b={self.index_b})"


def _check_q(q: int) -> int:
    q = int(q)
    if not 1 <= q < (1 << 32):
        raise ValueError(f"quantization q must be in [1, 2**32), got {q}")
    return q


def new(seed: int) -> RngState:
    return RngState(seed)


def next_uniform(state: RngState) -> float:
    return state.next_uniform()


def next_uniform_quantized(state: RngState, q: int) -> float:
    return state.next_uniform_quantized(q)


def bernoulli(state: RngState, p: float) -> bool:
    """True with probability ``p`` (one uniform draw compared against ``p``)."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability must lie in [0, 1], got {p}")
    return state.next_uniform() < p


def cumulative_weights(weights) -> np.ndarray:
    """Validated cumulative sums used by :func:`choose_weighted`."""
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ValueError("weights must be a nonempty 1-d sequence")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and nonnegative")
    cum = np.cumsum(w)
    if cum[-1] <= 0:
        raise ValueError("weights must not all be zero")
    return cum


def invert_cumulative(cum: np.ndarray, u):
    """Index of the first cumulative weight exceeding ``u * total``.

    Works on scalars and arrays.  Round-off that pushes ``u * total`` past
    the last entry lands on the last index carrying positive weight.
    """
    x = np.asarray(u) * cum[-1]
    idx = np.searchsorted(cum, x, side="right")
    last = int(np.flatnonzero(np.diff(cum, prepend=0.0) > 0)[-1])
    idx = np.minimum(idx, last)
    return int(idx) if np.ndim(idx) == 0 else idx


def choose_weighted(state: RngState, weights) -> int:
    """Choice by lot: index ``i`` with probability ``weights[i] / sum(weights)``."""
    cum = cumulative_weights(weights)
    return invert_cumulative(cum, state.next_uniform())


def derive_stream(stream: StreamId | tuple[int, int]) -> RngState:
    """Private generator for one trial; same id, same stream."""
    if not isinstance(stream, StreamId):
        stream = StreamId(*stream)
    root = _check_u64("root_seed", stream.root_seed)
    index = _check_u64("stream_index", stream.stream_index)
    return RngState(int(derive_seed(np.uint64(root), np.uint64(index))))


@njit(cache=True, nogil=True)
def substream_heads(root, offset, start, stop, out):
    """Row ``t`` of ``out`` gets the first uniforms of substream ``(root, offset + t)``."""
    ring = np.empty(RING, dtype=np.uint32)
    pos = np.empty(2, dtype=np.int64)
    for t in range(start, stop):
        seed_ring(derive_seed(root, np.uint64(offset + t)), ring, pos)
        for k in range(out.shape[1]):
            out[t, k] = next_uniform_k(ring, pos)


def stream_heads(root_seed: int, n: int, k: int, offset: int = 0) -> np.ndarray:
    """``(n, k)`` array: the first ``k`` uniforms of substreams ``offset .. offset+n-1``."""
    root = _check_u64("root_seed", root_seed)
    out = np.empty((int(n), int(k)), dtype=np.float64)
    substream_heads(np.uint64(root), int(offset), 0, int(n), out)
    return out
