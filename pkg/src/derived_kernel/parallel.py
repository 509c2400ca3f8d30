"""Optional worker pool, capped by DERIVED_KERNEL_THREADS.

Slice computations are pure and independent, so they may run on a
thread pool; results are collected in input order, so parallelism never
affects output content or ordering.  The default cap is 1 (sequential).
"""

import os
from concurrent.futures import ThreadPoolExecutor


def worker_cap():
    try:
        return max(1, int(os.environ.get("DERIVED_KERNEL_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items):
    items = list(items)
    cap = worker_cap()
    if cap <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=cap) as pool:
        return list(pool.map(fn, items))
