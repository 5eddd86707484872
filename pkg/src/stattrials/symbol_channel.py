"""Discrete memoryless channel given by a row-stochastic matrix.

Input symbols are indices 0..n-1 drawn from a source distribution; row ``i``
of the channel matrix gives the probabilities of the m >= n output symbols.
Outputs with index >= n are erasures (the error symbol ``b``).  Any output
different from the input counts as an error.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .errors import InvalidMatrixError
from .stats import StabilityTracker

ROW_TOL = 1e-9

DEFAULT_SOURCE = (0.3, 0.25, 0.45)
DEFAULT_MATRIX = (
    (0.7, 0.1, 0.1, 0.1),
    (0.1, 0.8, 0.1, 0.0),
    (0.2, 0.2, 0.5, 0.1),
)


@dataclass(frozen=True)
class SourceDist:
    probs: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=np.float64)
        if p.ndim != 1 or p.size == 0:
            raise InvalidMatrixError("source distribution must be a nonempty vector")
        if np.any(p < 0) or abs(p.sum() - 1.0) > ROW_TOL:
            raise InvalidMatrixError(f"source probabilities must be nonnegative and sum to 1, got {p.tolist()}")
        object.__setattr__(self, "probs", p)


@dataclass(frozen=True)
class ChannelMatrix:
    entries: np.ndarray

    @property
    def n_inputs(self) -> int:
        return self.entries.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.entries.shape[1]


def validate(matrix) -> ChannelMatrix:
    """Check that ``matrix`` is row-stochastic with at least as many columns as rows."""
    if isinstance(matrix, ChannelMatrix):
        matrix = matrix.entries
    try:
        a = np.array(matrix, dtype=np.float64)
    except ValueError as exc:
        raise InvalidMatrixError(f"matrix rows must have equal length: {exc}") from None
    if a.ndim != 2 or a.shape[0] == 0:
        raise InvalidMatrixError("channel matrix must be a nonempty 2-d array")
    if a.shape[1] < a.shape[0]:
        raise InvalidMatrixError("channel matrix needs at least as many outputs as inputs")
    for i, row in enumerate(a):
        if np.any(row < 0) or not np.all(np.isfinite(row)):
            raise InvalidMatrixError(f"row {i} has a negative or non-finite entry", row=i)
        if abs(row.sum() - 1.0) > ROW_TOL:
            raise InvalidMatrixError(f"row {i} sums to {row.sum():.12g}, not 1", row=i)
    a.setflags(write=False)
    return ChannelMatrix(a)


def _as_source(source) -> SourceDist:
    return source if isinstance(source, SourceDist) else SourceDist(source)


def transmit_once(source, matrix, state: _rng.RngState) -> tuple[int, int]:
    """Draw an input by lot, then its output from the matching matrix row."""
    source = _as_source(source)
    matrix = validate(matrix)
    i = _rng.choose_weighted(state, source.probs)
    j = _rng.choose_weighted(state, matrix.entries[i])
    return i, j


@dataclass
class TransmissionStats:
    n_sent: int
    n_errors: int
    errors_erasure_only: int
    confusion: np.ndarray
    running: np.ndarray
    first_stable_n: int | None

    @property
    def error_rate(self) -> float:
        return self.n_errors / self.n_sent

    @property
    def erasure_rate(self) -> float:
        return self.errors_erasure_only / self.n_sent


def transmit(source, matrix, trials: int, seed: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Inputs and outputs of ``trials`` transmissions.

    Trial ``t`` is ``transmit_once`` on the substream ``(seed, t)``: its first
    uniform picks the input, its second the output.
    """
    source = _as_source(source)
    matrix = validate(matrix)
    if trials < 1:
        raise ValueError("trials must be positive")
    u = _rng.stream_heads(seed, trials, 2)
    inputs = _rng.invert_cumulative(_rng.cumulative_weights(source.probs), u[:, 0])
    outputs = np.empty(trials, dtype=np.int64)
    u_out = u[:, 1]
    for i in range(matrix.n_inputs):
        mask = inputs == i
        if mask.any():
            cum = _rng.cumulative_weights(matrix.entries[i])
            outputs[mask] = _rng.invert_cumulative(cum, u_out[mask])
    return np.asarray(inputs, dtype=np.int64), outputs


def estimate_error_rate(source, matrix, trials: int, seed: int = 1,
                        window: int = 200, tolerance: float = 0.02) -> TransmissionStats:
    """Monte Carlo error probability with confusion counts and a stability point.

    The running estimate n_errors/n is fed to a :class:`StabilityTracker`;
    ``first_stable_n`` is the first n at which it reports stable.
    """
    matrix = validate(matrix)
    source = _as_source(source)
    if source.probs.size != matrix.n_inputs:
        raise ValueError("source length must match the number of matrix rows")
    inputs, outputs = transmit(source, matrix, trials, seed)
    confusion = np.zeros(matrix.entries.shape, dtype=np.int64)
    np.add.at(confusion, (inputs, outputs), 1)
    errors = outputs != inputs
    running = np.cumsum(errors) / np.arange(1, trials + 1)
    tracker = StabilityTracker(window, tolerance)
    first = None
    for n, value in enumerate(running, start=1):
        if tracker.push(value):
            first = n
            break
    return TransmissionStats(
        n_sent=trials,
        n_errors=int(errors.sum()),
        errors_erasure_only=int((outputs >= matrix.n_inputs).sum()),
        confusion=confusion,
        running=running,
        first_stable_n=first,
    )


def analytic_error_rate(source, matrix) -> float:
    """Sum over inputs of p_i (1 - P_ii)."""
    source = _as_source(source)
    m = validate(matrix).entries
    return float(sum(p * (1.0 - m[i, i]) for i, p in enumerate(source.probs)))


def analytic_erasure_rate(source, matrix) -> float:
    """Probability that the output is an erasure symbol."""
    source = _as_source(source)
    m = validate(matrix).entries
    n = m.shape[0]
    return float(sum(p * m[i, n:].sum() for i, p in enumerate(source.probs)))
