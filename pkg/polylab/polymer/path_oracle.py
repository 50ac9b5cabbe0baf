"""
Exact path enumeration oracles for the partition function, and the time-space
decomposition identity Z_n = sum_y Z_k(y) (Z_{n-k} o theta_{k,y}).
"""

# Standard Library Imports
from __future__ import annotations
from typing import Tuple

# External Imports
import numpy as np
from scipy.special import logsumexp

# Local Imports
from polylab.environment import SeededField, check_beta
from polylab.utils.lattice import LatticePmf
from polylab.utils.polylab_exceptions import EnumerationSizeError
from polylab.walk import StepDistribution

MAX_PATHS = 10**7


def _check_guard(walk: StepDistribution, n: int, max_paths: int):
    if n < 0:
        raise ValueError(f"n must be non-negative, but received {n}")
    if len(walk) ** n > max_paths:
        raise EnumerationSizeError(
            f"Enumerating {len(walk)}^{n} paths exceeds the guard of {max_paths} paths"
        )


def brute_force_endpoint(
    walk: StepDistribution,
    field: SeededField,
    beta: float,
    n: int,
    max_paths: int = MAX_PATHS,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Endpoint restricted partition functions log Z_n(x) by enumerating every path

    :param walk: Step distribution of the reference walk
    :type walk: StepDistribution
    :param field: Environment
    :type field: SeededField
    :param beta: Inverse temperature
    :type beta: float
    :param n: Number of steps
    :type n: int
    :param max_paths: Enumeration guard on |support(P)|^n
    :type max_paths: int
    :return: Tuple of (endpoints, log weights), endpoints sorted lexicographically
    :rtype: Tuple[np.ndarray, np.ndarray]
    :raises EnumerationSizeError: If more than max_paths paths would be enumerated
    """
    beta = check_beta(field.law, beta)
    _check_guard(walk, n, max_paths)
    positions = np.zeros((1, walk.d), dtype=np.int64)
    log_weights = np.zeros(1)
    log_q = np.log(walk.probs)
    for i in range(1, n + 1):
        positions = (positions[:, None, :] + walk.steps[None, :, :]).reshape(
            -1, walk.d
        )
        log_weights = (log_weights[:, None] + log_q[None, :]).reshape(-1)
        log_weights = log_weights + beta * field.evaluate_sites(i, positions)
    endpoints, inverse = np.unique(positions, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    group_max = np.full(endpoints.shape[0], -np.inf)
    np.maximum.at(group_max, inverse, log_weights)
    group_sum = np.bincount(
        inverse, weights=np.exp(log_weights - group_max[inverse]), minlength=len(group_max)
    )
    return endpoints, np.log(group_sum) + group_max


def brute_force_log_Z(
    walk: StepDistribution,
    field: SeededField,
    beta: float,
    n: int,
    max_paths: int = MAX_PATHS,
) -> float:
    """
    Exact log Z_n by enumerating every n step path

    :param walk: Step distribution of the reference walk
    :type walk: StepDistribution
    :param field: Environment
    :type field: SeededField
    :param beta: Inverse temperature
    :type beta: float
    :param n: Number of steps
    :type n: int
    :param max_paths: Enumeration guard on |support(P)|^n
    :type max_paths: int
    :return: log Z_n
    :rtype: float
    """
    if n == 0:
        check_beta(field.law, beta)
        return 0.0
    _, log_weights = brute_force_endpoint(walk, field, beta, n, max_paths)
    return float(logsumexp(log_weights))


def brute_force_pmf(
    walk: StepDistribution,
    field: SeededField,
    beta: float,
    n: int,
    max_paths: int = MAX_PATHS,
) -> LatticePmf:
    """Endpoint distribution f_n by path enumeration"""
    endpoints, log_weights = brute_force_endpoint(walk, field, beta, n, max_paths)
    return LatticePmf(sites=endpoints, probs=np.exp(log_weights - logsumexp(log_weights)))


def shift_identity_check(
    walk: StepDistribution,
    field: SeededField,
    beta: float,
    n: int,
    k: int,
    max_paths: int = MAX_PATHS,
) -> float:
    """
    Residual of the decomposition Z_n = sum_y Z_k(y) (Z_{n-k} o theta_{k,y}), all
    factors computed by exact enumeration

    :param walk: Step distribution of the reference walk
    :type walk: StepDistribution
    :param field: Environment
    :type field: SeededField
    :param beta: Inverse temperature
    :type beta: float
    :param n: Total number of steps
    :type n: int
    :param k: Split time, 0 <= k <= n
    :type k: int
    :param max_paths: Enumeration guard applied to every factor
    :type max_paths: int
    :return: |log Z_n - log sum_y Z_k(y) Z_{n-k}(theta_{k,y} eta)|
    :rtype: float
    """
    if not 0 <= k <= n:
        raise ValueError(f"k must satisfy 0 <= k <= n={n}, but received {k}")
    _check_guard(walk, n, max_paths)
    lhs = brute_force_log_Z(walk, field, beta, n, max_paths)
    if k == 0:
        ends = np.zeros((1, walk.d), dtype=np.int64)
        log_zk = np.zeros(1)
    else:
        ends, log_zk = brute_force_endpoint(walk, field, beta, k, max_paths)
    tails = np.array(
        [
            brute_force_log_Z(walk, field.shift_view(k, y), beta, n - k, max_paths)
            for y in ends
        ]
    )
    rhs = float(logsumexp(log_zk + tails))
    return abs(lhs - rhs)
