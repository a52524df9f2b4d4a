"""
Worker-pool helpers.

Results always come back in input order, so reductions over them are
independent of scheduling and of the number of workers.
"""

from multiprocessing import Pool
from typing import Callable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Sequence[T], workers: int = 1) -> List[R]:
    """
    Apply a picklable function to every item, in a process pool when workers > 1.

    Args:
        func: Module-level function (or functools.partial of one)
        items: Work items
        workers: Pool size; 1 runs in-process

    Returns:
        Results in the order of items
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    with Pool(processes=min(workers, len(items))) as pool:
        return pool.map(func, items)


def split_evenly(items: Sequence[T], parts: int) -> List[List[T]]:
    """Split items into at most `parts` contiguous, order-preserving chunks"""
    items = list(items)
    parts = max(1, min(parts, len(items)))
    size, extra = divmod(len(items), parts)
    chunks = []
    start = 0
    for i in range(parts):
        stop = start + size + (1 if i < extra else 0)
        chunks.append(items[start:stop])
        start = stop
    return [c for c in chunks if c]
