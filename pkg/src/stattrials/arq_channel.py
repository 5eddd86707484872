"""Stop-and-wait ARQ over a noisy binary channel, and channel capacity.

Data is cut into frames of D bits (D-1 payload bits plus one even-parity
bit).  Sending a frame costs D tacts; a frame found bad is sent again over
an ideal, delay-free feedback channel until it gets through.  Throughput is
information bits per tact: v = N_K (D-1) / t.

Two error models are available:

``abstract``
    A frame fails with probability p*D, decided by one uniform draw per
    attempt.  This linearisation of 1 - (1-p)**D gives the closed form
    v = (D-1)(1 - pD)/D and is the default.
``bit_exact``
    Every bit flips independently with probability p; the receiver
    rejects frames failing the parity check.  Frames with an even number of
    flips pass undetected and are counted separately.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from . import rng as _rng
from ._parallel import run_chunked
from .errors import RunawayError

log = logging.getLogger(__name__)

ABSTRACT = "abstract"
BIT_EXACT = "bit_exact"
MODELS = (ABSTRACT, BIT_EXACT)

DEFAULT_ERROR_PROBS = (0.001, 0.01, 0.02, 0.05)


@dataclass(frozen=True)
class ArqConfig:
    frame_len: int = 8
    bit_error_p: float = 0.05
    n_frames: int = 500
    error_model: str = ABSTRACT
    quantize: int | None = None
    max_attempts_per_frame: int = 1_000_000
    seed: int = 1

    def __post_init__(self):
        if self.frame_len < 2:
            raise ValueError(f"frame length must be at least 2, got {self.frame_len}")
        if not 0.0 <= self.bit_error_p <= 1.0:
            raise ValueError(f"bit error probability must lie in [0, 1], got {self.bit_error_p}")
        if self.n_frames < 1:
            raise ValueError("n_frames must be positive")
        if self.error_model not in MODELS:
            raise ValueError(f"unknown error model {self.error_model!r}; expected one of {MODELS}")
        if self.error_model == ABSTRACT and self.bit_error_p * self.frame_len >= 1.0:
            raise ValueError(
                f"abstract model needs p*D < 1 (p={self.bit_error_p}, D={self.frame_len}): "
                "every frame would fail")
        if self.quantize is not None and self.quantize < 1:
            raise ValueError("quantize must be a positive integer")


@dataclass(frozen=True)
class ArqResult:
    frame_len: int
    bit_error_p: float
    n_frames: int
    total_tacts: int
    frames_delivered: int
    retransmissions: int
    undetected_error_frames: int = 0

    @property
    def attempts(self) -> int:
        return self.frames_delivered + self.retransmissions

    @property
    def throughput(self) -> float:
        return self.n_frames * (self.frame_len - 1) / self.total_tacts


@dataclass(frozen=True)
class Frame:
    payload: tuple[int, ...]
    parity: int

    @property
    def bits(self) -> tuple[int, ...]:
        return self.payload + (self.parity,)


def encode_frame(payload, frame_len: int | None = None) -> Frame:
    """Append an even-parity bit to ``payload``."""
    bits = tuple(int(b) for b in payload)
    if frame_len is not None and len(bits) != frame_len - 1:
        raise ValueError(f"payload must have {frame_len - 1} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("payload bits must be 0 or 1")
    parity = 0
    for b in bits:
        parity ^= b
    return Frame(bits, parity)


def parity_check(frame) -> bool:
    """True when the XOR of all bits is zero."""
    bits = frame.bits if isinstance(frame, Frame) else frame
    acc = 0
    for b in bits:
        acc ^= int(b)
    return acc == 0


# --------------------------------------------------------------------------
# kernels
# --------------------------------------------------------------------------

@njit(cache=True, nogil=True)
def _draw(ring, pos, q):
    if q > 0:
        return _rng.next_quantized_k(ring, pos, q)
    return _rng.next_uniform_k(ring, pos)


@njit(cache=True, nogil=True)
def _abstract_kernel(ring, pos, frame_err, n_frames, q, cap):
    """Returns (attempts, ok)."""
    attempts = 0
    for _ in range(n_frames):
        k = 0
        while True:
            k += 1
            if not (_draw(ring, pos, q) < frame_err):
                break
            if k >= cap:
                return attempts + k, False
        attempts += k
    return attempts, True


@njit(cache=True, nogil=True)
def _bit_exact_kernel(ring, pos, D, p, n_frames, q, cap):
    """Returns (attempts, undetected, ok)."""
    frame = np.empty(D, dtype=np.int64)
    attempts = 0
    undetected = 0
    for _ in range(n_frames):
        parity = 0
        for i in range(D - 1):
            bit = 1 if _draw(ring, pos, q) < 0.5 else 0
            frame[i] = bit
            parity ^= bit
        frame[D - 1] = parity
        k = 0
        while True:
            k += 1
            acc = 0
            flips = 0
            for i in range(D):
                bit = frame[i]
                if _draw(ring, pos, q) < p:
                    bit ^= 1
                    flips += 1
                acc ^= bit
            if acc == 0:
                if flips > 0:
                    undetected += 1
                break
            if k >= cap:
                return attempts + k, undetected, False
        attempts += k
    return attempts, undetected, True


# --------------------------------------------------------------------------
# simulation
# --------------------------------------------------------------------------

def simulate(config: ArqConfig, state: _rng.RngState | None = None) -> ArqResult:
    """Send ``n_frames`` frames, retransmitting each until it is accepted."""
    state = state if state is not None else _rng.new(config.seed)
    q = int(config.quantize or 0)
    D, p, n = config.frame_len, float(config.bit_error_p), int(config.n_frames)
    cap = int(config.max_attempts_per_frame)
    undetected = 0
    if config.error_model == ABSTRACT:
        attempts, ok = _abstract_kernel(state.ring, state.pos, min(p * D, 1.0), n, q, cap)
    else:
        attempts, undetected, ok = _bit_exact_kernel(state.ring, state.pos, D, p, n, q, cap)
    if not ok:
        raise RunawayError(f"a frame needed more than {cap} attempts (D={D}, p={p})")
    attempts = int(attempts)
    return ArqResult(D, p, n, D * attempts, n, attempts - n, int(undetected))


def throughput_analytic(frame_len: int, p: float) -> float:
    """Expected throughput of the abstract model, (D-1)(1-pD)/D."""
    if p * frame_len >= 1.0:
        raise ValueError(f"p*D must be below 1 (p={p}, D={frame_len})")
    return (frame_len - 1) * (1.0 - p * frame_len) / frame_len


def throughput_stderr(frame_len: int, p: float, n_frames: int) -> float:
    """Delta-method standard error of the simulated abstract-model throughput.

    Attempts per frame are geometric with failure probability q = pD, so the
    total A has mean N/(1-q) and variance N q/(1-q)**2; v = N(D-1)/(D A)
    then has relative error sqrt(q/N).
    """
    q = p * frame_len
    return throughput_analytic(frame_len, p) * math.sqrt(q / n_frames)


def undetected_probability(frame_len: int, p: float) -> float:
    """Probability that a frame carries a nonzero even number of flips."""
    return sum(math.comb(frame_len, k) * p**k * (1.0 - p) ** (frame_len - k)
               for k in range(2, frame_len + 1, 2))


def bit_exact_success_probability(frame_len: int, p: float) -> float:
    """Probability that an attempt passes parity (even number of flips, incl. zero)."""
    return 0.5 * (1.0 + (1.0 - 2.0 * p) ** frame_len)


@dataclass(frozen=True)
class SweepPoint:
    frame_len: int
    v_sim: float
    v_analytic: float
    stderr: float


def sweep_frame_length(p: float, d_min: int, d_max: int, n_frames: int, seed: int = 1,
                       threads: int = 1, quantize: int | None = None) -> list[SweepPoint]:
    """Throughput for each admissible D in [d_min, d_max].

    Frame lengths with p*D >= 1 are skipped and logged.  Point D uses the
    substream ``(seed, D)``.
    """
    if d_min < 2:
        raise ValueError("d_min must be at least 2")
    lengths = list(range(int(d_min), int(d_max) + 1))
    admissible = [D for D in lengths if p * D < 1.0]
    skipped = [D for D in lengths if p * D >= 1.0]
    if skipped:
        log.info("p=%g: skipping frame lengths %s (p*D >= 1)", p, skipped)
    if not admissible:
        raise ValueError(f"no admissible frame length in [{d_min}, {d_max}] for p={p}")
    results: list[SweepPoint | None] = [None] * len(admissible)

    def call(lo, hi):
        for i in range(lo, hi):
            D = admissible[i]
            cfg = ArqConfig(D, p, n_frames, quantize=quantize)
            res = simulate(cfg, _rng.derive_stream((seed, D)))
            results[i] = SweepPoint(D, res.throughput, throughput_analytic(D, p),
                                    throughput_stderr(D, p, n_frames))

    run_chunked(call, len(admissible), threads, min_chunk=1)
    return results


def empirical_capacity(p: float, d_min: int, d_max: int, n_frames: int, seed: int = 1,
                       threads: int = 1) -> tuple[float, int]:
    """Maximum simulated throughput over frame lengths, and the smallest D attaining it."""
    best = None
    for pt in sweep_frame_length(p, d_min, d_max, n_frames, seed, threads):
        if best is None or pt.v_sim > best.v_sim:
            best = pt
    return best.v_sim, best.frame_len


def bsc_capacity(p: float, c0: float = 1.0) -> float:
    """Binary symmetric channel capacity c0 (1 + p log2 p + (1-p) log2 (1-p))."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")

    def plogp(x):
        return 0.0 if x == 0.0 else x * math.log2(x)

    return c0 * (1.0 + plogp(p) + plogp(1.0 - p))


@dataclass(frozen=True)
class CapacityPoint:
    p: float
    c_emp: float
    c_bsc: float
    d_opt: int
    stderr: float


def capacity_curve(p_list, d_max: int = 64, n_frames: int = 100_000, seed: int = 1,
                   threads: int = 1) -> list[CapacityPoint]:
    """Empirical ARQ capacity next to the BSC formula for each p in [0, 0.5)."""
    p_list = [float(p) for p in p_list]
    for p in p_list:
        if not 0.0 <= p < 0.5:
            raise ValueError(f"capacity_curve needs p in [0, 0.5), got {p}")
    rows = []
    for k, p in enumerate(p_list):
        # each p gets its own root so its sweep streams do not repeat another's
        root = int(_rng.derive_seed(np.uint64(seed), np.uint64(k)))
        pts = sweep_frame_length(p, 2, d_max, n_frames, root, threads)
        best = max(pts, key=lambda pt: (pt.v_sim, -pt.frame_len))
        rows.append(CapacityPoint(p, best.v_sim, bsc_capacity(p), best.frame_len, best.stderr))
    return rows
