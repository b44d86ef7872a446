"""
Replica fan-out.

Every replica carries its own keyed sub-seed, so results depend only on the
task list and never on how tasks are distributed over worker processes.
"""

import concurrent.futures as cf
from typing import Any, Callable, Iterable, List, TypeVar

from loguru import logger


T = TypeVar("T")


def run_replicas(
    fn: Callable[[Any], T],
    tasks: Iterable[Any],
    threads: int = 1,
) -> List[T]:
    """
    Apply ``fn`` to every task, preserving task order.

    ``fn`` and the tasks must be picklable when ``threads > 1`` (module-level
    functions, plain data and InstructionSource objects all are).
    """
    tasks = list(tasks)
    if threads <= 1 or len(tasks) < 2:
        return [fn(task) for task in tasks]

    workers = min(threads, len(tasks))
    chunksize = max(1, len(tasks) // (workers * 4))
    logger.debug(f"Fanning out {len(tasks)} replicas over {workers} processes")
    with cf.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunksize))
