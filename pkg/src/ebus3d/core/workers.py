"""Worker-pool helpers built on anyio."""

import os
from functools import partial
from typing import Any, Callable, List, Optional, Sequence, TypeVar

import anyio

from .anyio_compat import first_leaf_exception, get_exception_group_types
from .errors import ConfigError, Ebus3dError

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV = "EBUS3D_THREADS"


def worker_limit(environ: Optional[dict] = None) -> int:
    """Worker count from ``EBUS3D_THREADS`` (default 1, fully deterministic)."""
    env = os.environ if environ is None else environ
    raw = env.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}", key=THREADS_ENV) from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {value}", key=THREADS_ENV)
    return value


async def map_concurrently(
    func: Callable[..., R],
    items: Sequence[T],
    *,
    limit: int = 1,
    **kwargs: Any,
) -> List[R]:
    """Run ``func(item, **kwargs)`` in worker threads; results keep input order.

    Errors raised by workers are unwrapped from the task-group exception group,
    so callers see the original exception.
    """
    limiter = anyio.CapacityLimiter(limit)
    results: List[Any] = [None] * len(items)

    async def run_one(index: int, item: T) -> None:
        results[index] = await anyio.to_thread.run_sync(partial(func, item, **kwargs), limiter=limiter)

    try:
        async with anyio.create_task_group() as tg:
            for index, item in enumerate(items):
                tg.start_soon(run_one, index, item)
    except get_exception_group_types() as group:
        raise first_leaf_exception(group, prefer=(Ebus3dError, OSError)) from group
    return results
