"""Parallel execution of independent replications and CV folds.

Work items carry their own random streams, so results do not depend on
the number of workers or on completion order.
"""

import concurrent.futures
from typing import Callable, Iterable, List, Optional, Tuple, TypeVar, Union, cast

import psutil

from .logger import logger

T = TypeVar("T")
R = TypeVar("R")


def default_workers() -> int:
    """Physical core count, falling back to the logical count, then 1."""
    count = psutil.cpu_count(logical=False) or psutil.cpu_count(logical=True)
    return max(1, int(count or 1))


def resolve_workers(jobs: Optional[int]) -> int:
    """Map a ``--jobs`` value to a worker count; 0 or None means all physical cores."""
    if not jobs:
        return default_workers()
    return max(1, int(jobs))


def run_parallel(
    func: Callable[[T], R],
    items: Iterable[T],
    max_workers: int = 4,
    timeout: Optional[float] = None,
) -> List[R]:
    """
    Run a function on every item, in parallel when more than one worker is allowed.

    Args:
        func: Function to execute
        items: Iterable of items to process
        max_workers: Maximum number of parallel workers
        timeout: Maximum time to wait for all tasks (None = no timeout)

    Returns:
        List of results in the same order as input items

    Raises:
        Exception: The first exception raised by ``func``, after logging it
    """
    items_list = list(items)

    if not items_list:
        return []

    if max_workers <= 1:
        return [func(item) for item in items_list]

    # numpy and scipy release the GIL inside their linear algebra kernels.
    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_index = {
            executor.submit(func, item): index for index, item in enumerate(items_list)
        }
        results: List[Optional[R]] = [None] * len(items_list)
        completed = 0

        for future in concurrent.futures.as_completed(future_to_index, timeout=timeout):
            index = future_to_index[future]
            try:
                results[index] = future.result()
                completed += 1
            except Exception as e:
                logger.error(f"Error processing work item {index}: {e}")
                raise

        if completed != len(items_list):
            raise RuntimeError(f"Only {completed}/{len(items_list)} tasks completed")

        return [cast(R, result) for result in results]


def run_parallel_with_results(
    func: Callable[[T], R],
    items: Iterable[T],
    max_workers: int = 4,
    timeout: Optional[float] = None,
    on_done: Optional[Callable[[], None]] = None,
) -> List[Tuple[T, Union[R, Exception]]]:
    """
    Run a function on every item and return results paired with their items.

    Unlike run_parallel, exceptions are caught and returned in place of results,
    so one failed replication does not abort a benchmark.

    Args:
        func: Function to execute
        items: Iterable of items to process
        max_workers: Maximum number of parallel workers
        timeout: Maximum time to wait for all tasks
        on_done: Called once per finished item, e.g. to advance a progress bar

    Returns:
        List of (item, result_or_exception) tuples in input order
    """
    items_list = list(items)

    if not items_list:
        return []

    results: List[Optional[Tuple[T, Union[R, Exception]]]] = [None] * len(items_list)

    if max_workers <= 1:
        for index, item in enumerate(items_list):
            try:
                results[index] = (item, func(item))
            except Exception as e:
                results[index] = (item, e)
            if on_done is not None:
                on_done()
        return [cast(Tuple[T, Union[R, Exception]], result) for result in results]

    with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as executor:
        future_to_index = {
            executor.submit(func, item): index for index, item in enumerate(items_list)
        }

        for future in concurrent.futures.as_completed(future_to_index, timeout=timeout):
            index = future_to_index[future]
            item = items_list[index]
            try:
                results[index] = (item, future.result())
            except Exception as e:
                results[index] = (item, e)
            if on_done is not None:
                on_done()

    return [cast(Tuple[T, Union[R, Exception]], result) for result in results]
