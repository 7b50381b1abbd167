"""Deterministic fan-out over independent tasks.

BLAS is pinned to one thread inside every call so that a task's floating
point result does not depend on how many workers run next to it; results
come back in submission order and are reduced by the caller.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List

import numpy as np
from threadpoolctl import threadpool_limits


def ordered_map(fn: Callable, items: Iterable, threads: int = 1) -> List:
    items = list(items)
    with threadpool_limits(limits=1, user_api="blas"):
        if threads <= 1 or len(items) <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))


def task_seed(seed: int, *path: int) -> np.random.SeedSequence:
    """Seed for one task, independent of worker count and scheduling."""
    return np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, *map(int, path)])


def pairwise_sum(values):
    """Fixed-order pairwise reduction of floats or arrays (same tree for the
    same length)."""
    vals = list(values)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]
