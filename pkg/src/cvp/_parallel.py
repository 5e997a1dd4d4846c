"""Thread-pool mapping honoring the CVP_THREADS environment variable."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    raw = os.environ.get("CVP_THREADS", "0").strip() or "0"
    try:
        k = int(raw)
    except ValueError:
        k = 0
    if k <= 0:
        k = os.cpu_count() or 1
    return k


def pmap(fn, items, chunk: int = 256) -> list:
    """Order-preserving map; runs chunks on a thread pool when allowed."""
    items = list(items)
    workers = worker_count()
    if workers <= 1 or len(items) <= chunk:
        return [fn(x) for x in items]
    chunks = [items[i:i + chunk] for i in range(0, len(items), chunk)]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(lambda c: [fn(x) for x in c], chunks))
    return [y for part in parts for y in part]
