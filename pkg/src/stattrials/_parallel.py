"""Chunked execution of index-addressed trial kernels.

Kernels write trial ``i`` into slot ``i`` of preallocated arrays and draw
from the substream ``(root, offset + i)``, so the chunking and the thread
schedule cannot change the result.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor


def run_chunked(call, n: int, threads: int = 1, min_chunk: int = 256) -> None:
    """Invoke ``call(start, stop)`` over ``[0, n)`` using up to ``threads`` workers.

    ``call`` must be a nogil kernel wrapper that only touches its own slots.
    """
    threads = max(1, int(threads))
    if threads == 1 or n <= min_chunk:
        call(0, n)
        return
    n_chunks = min(threads * 4, max(1, n // min_chunk))
    bounds = [n * k // n_chunks for k in range(n_chunks + 1)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(call, lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
        for f in futures:
            f.result()
