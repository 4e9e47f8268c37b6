"""Ordered fan-out of independent sweep jobs."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import structlog

from Harmonator.metrics import inc_counter

T = TypeVar("T")
R = TypeVar("R")

log = structlog.get_logger()


def run_ordered(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> list[R]:
    """Apply ``fn`` to every item and return the results in input order.

    Jobs share nothing mutable, so output does not depend on ``threads``. The first job
    exception propagates after the pool is shut down.
    """
    work = list(items)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    inc_counter("sweeps.jobs", len(work))
    if threads == 1 or len(work) <= 1:
        return [fn(item) for item in work]
    log.debug("sweeps.run.start", jobs=len(work), threads=threads)
    with ThreadPoolExecutor(max_workers=min(threads, len(work))) as pool:
        return list(pool.map(fn, work))
