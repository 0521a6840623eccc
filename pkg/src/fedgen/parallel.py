"""Replicate-level parallelism with order-independent results.

Workers receive disjoint replicate ranges; every replicate derives its own
random streams, and the parent reduces partial results in replicate order, so
the outcome is identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def resolve_threads(threads: int | None = None) -> int:
    """Explicit argument, else FEDGEN_THREADS, else machine parallelism."""
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get("FEDGEN_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _chunks(total: int, parts: int) -> list[range]:
    parts = min(parts, total) or 1
    size, extra = divmod(total, parts)
    out, start = [], 0
    for p in range(parts):
        stop = start + size + (1 if p < extra else 0)
        out.append(range(start, stop))
        start = stop
    return out


def map_replicates(worker, total: int, threads: int = 1) -> list:
    """Run `worker(range)` over replicate chunks; concatenate in order.

    `worker` must be a picklable callable returning a list with one entry per
    replicate in its range.
    """
    threads = max(1, threads)
    if total == 0:
        return []
    if threads == 1 or total == 1:
        return list(worker(range(total)))
    results: list = []
    chunks = _chunks(total, threads * 4)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        for part in pool.map(worker, chunks):
            results.extend(part)
    return results
