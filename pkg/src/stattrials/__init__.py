"""Deterministic Monte Carlo statistical-trials experiments.

Every module draws its randomness from the lagged-Fibonacci generator in
:mod:`stattrials.rng`; a seed fixes every result.
"""
__version__ = "0.1.0"

from .rng import RngState, StreamId, derive_stream, new  # noqa: E402
from .stats import Histogram, StabilityTracker, SummaryStats, histogram, merge, summarize  # noqa: E402

__all__ = [
    "RngState", "StreamId", "derive_stream", "new",
    "Histogram", "StabilityTracker", "SummaryStats", "histogram", "merge", "summarize",
]
