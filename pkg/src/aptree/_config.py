from __future__ import annotations

import os

from .exceptions import UserError
from .logger import logger
from .settings import Tolerance

_default_tolerance: Tolerance = Tolerance()
_default_workers: int | None = None


def set_default_tolerance(tolerance: Tolerance) -> None:
    """Set the tolerance used by every operation that is not given one explicitly."""
    global _default_tolerance
    _default_tolerance = tolerance


def get_default_tolerance() -> Tolerance:
    return _default_tolerance


def resolve_tolerance(tolerance: Tolerance | None) -> Tolerance:
    return tolerance if tolerance is not None else _default_tolerance


def set_default_workers(workers: int | None) -> None:
    """Set the number of threads scans use. `None` falls back to `APTREE_NUM_THREADS`, then 1."""
    global _default_workers
    if workers is not None and workers < 1:
        raise UserError("Worker count must be at least 1")
    _default_workers = workers


def get_default_workers() -> int:
    if _default_workers is not None:
        return _default_workers

    value = os.getenv("APTREE_NUM_THREADS")
    if not value:
        return 1
    try:
        workers = int(value)
    except ValueError:
        logger.warning(f"Ignoring non-integer APTREE_NUM_THREADS={value!r}")
        return 1
    return max(workers, 1)
