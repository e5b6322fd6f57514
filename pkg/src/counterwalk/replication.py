"""Deterministic seed derivation and replica scheduling.

Every replica draws from its own stream whose seed is a 64-bit avalanche
mix of the master seed and the replica index.  Results are therefore
independent of how replicas are scheduled, and identical for any worker
count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

T = TypeVar("T")
U = TypeVar("U")


def splitmix64(z: int) -> int:
    """One round of the splitmix64 avalanche mixer."""
    z = (z + _GOLDEN) & _MASK
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK
    z ^= z >> 31
    return z


def child_seed(master: int, index: int) -> int:
    """Collision-resistant child seed for replica ``index``."""
    return splitmix64((master & _MASK) ^ splitmix64(index & _MASK))


def thread_cap() -> int:
    """Worker cap from ``COUNTERWALK_THREADS`` (default: machine cores)."""
    raw = os.environ.get("COUNTERWALK_THREADS", "")
    if raw.strip():
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ValueError(f"COUNTERWALK_THREADS must be an integer, got {raw!r}") from exc
        if cap < 1:
            raise ValueError("COUNTERWALK_THREADS must be >= 1")
        return cap
    return os.cpu_count() or 1


def run_replicas(
    fn: Callable[[U], T],
    tasks: Sequence[U],
    workers: int | None = None,
) -> list[T]:
    """Evaluate ``fn`` on each replica task, in replica-index order.

    ``fn`` must be a module-level callable (or partial of one) when
    ``workers > 1``: it is shipped to worker processes.  Output order
    never depends on the schedule.
    """
    if workers is None:
        workers = thread_cap()
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * workers))))


def replica_seeds(master: int, count: int) -> list[int]:
    return [child_seed(master, i) for i in range(count)]
