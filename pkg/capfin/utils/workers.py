from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "CAPFIN_THREADS"


def worker_count(default: int | None = None) -> int:
    """Thread count from ``CAPFIN_THREADS``, else ``default``, else the CPU count (at least 1)."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    if default is not None:
        return max(1, default)
    return max(1, os.cpu_count() or 1)


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> List[R]:
    """``[fn(x) for x in items]`` on a thread pool; results keep input order."""
    items = list(items)
    n = min(worker_count() if workers is None else max(1, workers), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
