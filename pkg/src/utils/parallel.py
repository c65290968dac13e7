"""
Thread-pool fan-out for independent seeded tasks.
"""

import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from .logger import get_logger

logger = get_logger(__name__)

THREADS_ENV_VAR = 'GEO_SUBLINEAR_THREADS'

T = TypeVar('T')
R = TypeVar('R')


def resolve_workers(configured: int | None = None) -> int:
    """
    Resolve the worker count.

    The environment variable wins over the configured value, which wins over
    the CPU count.

    Args:
        configured: Value of runtime.threads, or None.

    Returns:
        Positive worker count.
    """
    env_value = os.environ.get(THREADS_ENV_VAR)
    if env_value:
        try:
            workers = int(env_value)
            if workers >= 1:
                return workers
        except ValueError:
            pass
        logger.warning(f"Ignoring invalid {THREADS_ENV_VAR}={env_value!r}")

    if configured is not None and configured >= 1:
        return int(configured)

    return os.cpu_count() or 1


def ordered_map(
    func: Callable[[T], R],
    items: Iterable[T],
    workers: int | None = None
) -> list[R]:
    """
    Apply func to every item, returning results in submission order.

    Args:
        func: Pure task function.
        items: Task inputs.
        workers: Worker count; resolved via resolve_workers() when None.

    Returns:
        List of results aligned with items.
    """
    items = list(items)
    workers = resolve_workers(workers)

    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as executor:
        return list(executor.map(func, items))
