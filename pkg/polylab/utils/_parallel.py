"""
Utility functions for running independent tasks with python multiprocessing, and
for deriving reproducible random number streams for those tasks
"""

from __future__ import annotations

import os
from multiprocessing import Pool, cpu_count
from typing import Callable, Iterable, List, Optional, TypeVar

import numpy as np
from tqdm import tqdm

T = TypeVar("T")
R = TypeVar("R")

# Tags used to derive independent seed streams for each purpose
REPLICA_FIELD_TAG = 1
ENERGY_ROWS_TAG = 2
SUBSAMPLE_TAG = 3
UPDATE_ROWS_TAG = 4
CHAIN_FIELD_TAG = 5
ORACLE_TAG = 6

WORKERS_ENV_VAR = "POLYLAB_WORKERS"


def _resolve_processes(processes: Optional[int] = None) -> int:
    """
    Find the number of worker processes to use

    :param processes: Requested number of processes, overridden by the
        POLYLAB_WORKERS environment variable when that is set
    :type processes: Optional[int]
    :return: Number of processes, at least 1 and at most cpu_count()
    :rtype: int
    """
    env_workers = os.environ.get(WORKERS_ENV_VAR)
    if env_workers:
        try:
            processes = int(env_workers)
        except ValueError as err:
            raise ValueError(
                f"{WORKERS_ENV_VAR} must be an integer, but received {env_workers!r}"
            ) from err
    if processes is None:
        processes = 1
    return max(1, min(int(processes), cpu_count()))


def _derive_seed(base_seed: int, tag: int, index: int) -> int:
    """
    Derive a child seed from a base seed, a purpose tag, and a task index

    :param base_seed: Non-negative base seed
    :type base_seed: int
    :param tag: Integer tag identifying the purpose of the stream
    :type tag: int
    :param index: Index of the task
    :type index: int
    :return: Child seed, a non-negative 63 bit integer
    :rtype: int
    """
    if base_seed < 0:
        raise ValueError(f"base_seed must be non-negative, but received {base_seed}")
    seq = np.random.SeedSequence(entropy=int(base_seed), spawn_key=(int(tag), int(index)))
    return int(seq.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def _ordered_map(
    func: Callable[[T], R],
    tasks: Iterable[T],
    processes: int = 1,
    progress_bar: bool = False,
) -> List[R]:
    """
    Apply func to every task, in a worker pool if more than one process is
    requested. Results are returned in task order whatever the number of workers.

    :param func: Module level (picklable) function applied to each task
    :type func: Callable[[T], R]
    :param tasks: Tasks to process
    :type tasks: Iterable[T]
    :param processes: Number of processes to use
    :type processes: int
    :param progress_bar: Whether a progress bar should be displayed
    :type progress_bar: bool
    :return: List of results in the same order as tasks
    :rtype: List[R]
    """
    tasks = list(tasks)
    processes = max(1, min(processes, cpu_count(), max(len(tasks), 1)))
    if processes == 1:
        return [func(t) for t in tqdm(tasks, disable=not progress_bar)]
    results = []
    with Pool(processes=processes) as pool, tqdm(
        total=len(tasks), disable=not progress_bar
    ) as pbar:
        for res in pool.imap(func, tasks, chunksize=max(1, len(tasks) // processes)):
            results.append(res)
            pbar.update()
    return results
