"""Thread-pool helper honoring the LONGDIFF_THREADS cap."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_cap() -> int:
    raw = os.environ.get("LONGDIFF_THREADS", "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            return 1
    return os.cpu_count() or 1


def map_ordered(fn, items):
    """Apply ``fn`` to each item, results in input order.

    Runs on a thread pool when more than one worker is allowed; the order of
    the returned list never depends on scheduling.
    """
    items = list(items)
    workers = min(worker_cap(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
