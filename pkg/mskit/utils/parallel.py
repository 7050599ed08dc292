"""Ordered fan-out of independent work items over worker threads."""

import asyncio
from collections.abc import Callable, Sequence
from typing import TypeVar

T = TypeVar("T")
R = TypeVar("R")


async def _gather_ordered(func: Callable[[T], R], items: Sequence[T], threads: int) -> list[R]:
    semaphore = asyncio.Semaphore(threads)

    async def run_one(item: T) -> R:
        async with semaphore:
            return await asyncio.to_thread(func, item)

    # gather keeps input order, so downstream reductions are thread-count independent
    return await asyncio.gather(*(run_one(item) for item in items))


def gather_ordered(func: Callable[[T], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """
    Apply ``func`` to every item, using up to ``threads`` worker threads.

    Results come back in input order. With ``threads == 1`` the items are
    processed sequentially in the calling thread. The first exception raised by
    ``func`` propagates.

    Args:
        func: Pure function applied to each item.
        items: Work items.
        threads: Maximum number of concurrent workers (>= 1).

    Returns:
        List of results aligned with ``items``.
    """
    if threads < 1:
        raise ValueError(f"threads must be >= 1, got {threads}")
    if threads == 1 or len(items) <= 1:
        return [func(item) for item in items]
    return asyncio.run(_gather_ordered(func, items, threads))
