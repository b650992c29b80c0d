import logging
from concurrent.futures import ThreadPoolExecutor

logger = logging.getLogger(__name__)

_workers = 1


def set_workers(n):
    """Caps the worker threads used by every parallel map in the package (1 means run inline)."""
    global _workers
    n = int(n)
    if n < 1:
        raise ValueError("Worker count must be at least 1, got " + str(n))
    _workers = n
    logger.debug("Using %d worker threads", n)


def get_workers():
    return _workers


def pmap(fn, items):
    """list(map(fn, items)) on up to the configured number of threads. Results keep the order of items."""
    items = list(items)
    if _workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(_workers, len(items))) as pool:
        return list(pool.map(fn, items))
