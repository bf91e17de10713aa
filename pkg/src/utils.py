import time
from collections import defaultdict
from contextlib import contextmanager
from functools import wraps

import numba
from loguru import logger


def max_workers() -> int:
    return int(numba.config.NUMBA_NUM_THREADS)


@contextmanager
def worker_scope(worker_count: int | None):
    """
    Runs the enclosed block with the numba thread pool limited to
    worker_count threads (clamped to the pool size), then restores it.
    """
    if worker_count is None:
        yield numba.get_num_threads()
        return
    previous = numba.get_num_threads()
    wanted = max(1, min(int(worker_count), max_workers()))
    if wanted < worker_count:
        logger.warning(f"Requested {worker_count} workers, numba pool has {wanted}; using {wanted}")
    numba.set_num_threads(wanted)
    try:
        yield wanted
    finally:
        numba.set_num_threads(previous)


class StageTimer:
    """Accumulates wall time per stage tag ('vf', 'coloring', 'clustering', 'rebuild')."""

    STAGES = ("vf", "coloring", "clustering", "rebuild")

    def __init__(self):
        self.seconds: dict[str, float] = defaultdict(float)

    @contextmanager
    def stage(self, name: str):
        start = time.perf_counter()
        box = {"elapsed": 0.0}
        try:
            yield box
        finally:
            box["elapsed"] = time.perf_counter() - start
            self.seconds[name] += box["elapsed"]

    @property
    def total(self) -> float:
        return sum(self.seconds.values())

    def breakdown(self) -> str:
        return ";".join(f"{name}={self.seconds.get(name, 0.0):.6f}" for name in self.STAGES)


def timed(func):
    """Logs the wall time of a call at DEBUG level."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        start = time.perf_counter()
        try:
            return func(*args, **kwargs)
        finally:
            logger.debug(f"{func.__name__} took {time.perf_counter() - start:.4f}s")
    return wrapper
