"""
Chunked fan-out for the --jobs contract.

Work is split into contiguous batches and the batch results are concatenated
in input order, so the output never depends on the number of workers.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, List, Sequence, TypeVar

from .validators import ParameterValidator

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def split_batches(items: Sequence[T], jobs: int) -> List[List[T]]:
    """Split items into at most `jobs` contiguous, non-empty batches of near-equal size."""
    items = list(items)
    if not items:
        return []
    jobs = min(jobs, len(items))
    size, extra = divmod(len(items), jobs)
    batches, start = [], 0
    for i in range(jobs):
        end = start + size + (1 if i < extra else 0)
        batches.append(items[start:end])
        start = end
    return batches


def map_chunks(
    func: Callable[..., List[R]], items: Sequence[T], jobs: int = 1, *args: Any
) -> List[R]:
    """
    Evaluate func(batch, *args) over batches of items and concatenate the results.

    Args:
        func: Module-level callable taking a list of items plus extra arguments
            and returning one result per item
        items: Work units
        jobs: Worker processes; 1 runs inline
        *args: Extra picklable arguments passed to every batch

    Returns:
        Results in the order of items

    Raises:
        InvalidParameterError: If jobs < 1
    """
    ParameterValidator.validate_jobs(jobs)
    batches = split_batches(items, jobs)
    if jobs == 1 or len(batches) <= 1:
        return [result for batch in batches for result in func(batch, *args)]

    logger.debug(f"Dispatching {len(items)} work units in {len(batches)} batches")
    with ProcessPoolExecutor(max_workers=len(batches)) as executor:
        futures = [executor.submit(func, batch, *args) for batch in batches]
        results: List[R] = []
        for future in futures:
            results.extend(future.result())
    return results
