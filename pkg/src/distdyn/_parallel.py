"""Block-parallel evaluation with a reduction order fixed by block size, not worker count."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

BLOCK = 64


def thread_count() -> int:
    raw = os.environ.get("DISTDYN_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def map_rows(func, n_rows: int, out: np.ndarray) -> np.ndarray:
    """Fill ``out[a:b] = func(a, b)`` over fixed-size row blocks."""
    blocks = [(a, min(a + BLOCK, n_rows)) for a in range(0, n_rows, BLOCK)]

    def run(ab):
        a, b = ab
        out[a:b] = func(a, b)

    workers = min(thread_count(), len(blocks))
    if workers <= 1:
        for ab in blocks:
            run(ab)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, blocks))
    return out
