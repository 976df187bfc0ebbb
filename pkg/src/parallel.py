"""
Thread-pool map used by the scan kernels.

Results always come back in input order, so reports do not depend on the
worker count.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

from src.config import config

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def chunked(items: Sequence[T], size: int) -> List[Sequence[T]]:
    size = max(1, int(size))
    return [items[i:i + size] for i in range(0, len(items), size)]


def parallel_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """Ordered map over `items` on a thread pool (serial when one worker)."""
    items = list(items)
    workers = min(config.thread_count(threads), max(1, len(items)))
    if workers <= 1:
        return [func(item) for item in items]
    logger.debug(f"parallel_map: {len(items)} tasks on {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
