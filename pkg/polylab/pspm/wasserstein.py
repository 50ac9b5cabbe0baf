"""
Wasserstein distance between uniformly weighted empirical measures on the space of
partitioned subprobability measures, solved as an optimal assignment problem.
"""

# Standard Library Imports
from __future__ import annotations
import functools
from typing import Optional, Sequence

# External Imports
import numpy as np
from scipy.optimize import linear_sum_assignment

# Local Imports
from polylab.pspm.metric_functions import (
    DEFAULT_SUPPORT_CAP,
    d_alpha_exact,
    d_alpha_upper,
)
from polylab.pspm.pspm import EmpiricalMeasure, Pspm
from polylab.utils._parallel import _ordered_map
from polylab.utils.polylab_exceptions import EnumerationSizeError

MAX_ATOMS = 512


def distance(
    f: Pspm,
    g: Pspm,
    alpha: float,
    exact: Optional[bool] = None,
    support_cap: int = DEFAULT_SUPPORT_CAP,
) -> float:
    """
    Alpha-distance between two Pspms, exact or heuristic

    :param f: First Pspm
    :type f: Pspm
    :param g: Second Pspm
    :type g: Pspm
    :param alpha: Exponent, greater than 1
    :type alpha: float
    :param exact: True for the exact distance, False for the heuristic upper bound,
        None to use the exact distance whenever both supports are within
        support_cap
    :type exact: Optional[bool]
    :param support_cap: Support size cap of the exact distance
    :type support_cap: int
    :return: The distance
    :rtype: float
    """
    if exact is None:
        exact = len(f) <= support_cap and len(g) <= support_cap
    if exact:
        return d_alpha_exact(f, g, alpha, support_cap)
    return d_alpha_upper(f, g, alpha)


def distance_matrix(
    atoms_a: Sequence[Pspm],
    atoms_b: Sequence[Pspm],
    alpha: float,
    exact: Optional[bool] = None,
    support_cap: int = DEFAULT_SUPPORT_CAP,
    processes: int = 1,
    progress_bar: bool = False,
) -> np.ndarray:
    """
    Matrix of alpha-distances between two collections of Pspms

    :param atoms_a: Row Pspms
    :type atoms_a: Sequence[Pspm]
    :param atoms_b: Column Pspms
    :type atoms_b: Sequence[Pspm]
    :param alpha: Exponent, greater than 1
    :type alpha: float
    :param exact: Distance mode, see :func:`distance`
    :type exact: Optional[bool]
    :param support_cap: Support size cap of the exact distance
    :type support_cap: int
    :param processes: Number of processes, rows are computed in parallel
    :type processes: int
    :param progress_bar: Whether to display a progress bar
    :type progress_bar: bool
    :return: Array of shape (len(atoms_a), len(atoms_b))
    :rtype: np.ndarray
    """
    rows = _ordered_map(
        functools.partial(
            _distance_row,
            atoms_b=list(atoms_b),
            alpha=alpha,
            exact=exact,
            support_cap=support_cap,
        ),
        list(atoms_a),
        processes=processes,
        progress_bar=progress_bar,
    )
    return np.array(rows, dtype=float).reshape(len(atoms_a), len(atoms_b))


def _distance_row(f, atoms_b, alpha, exact, support_cap):
    return [distance(f, g, alpha, exact, support_cap) for g in atoms_b]


def wasserstein(
    mu: EmpiricalMeasure,
    nu: EmpiricalMeasure,
    alpha: float,
    exact: Optional[bool] = None,
    support_cap: int = DEFAULT_SUPPORT_CAP,
    processes: int = 1,
) -> float:
    """
    Wasserstein distance between two uniform empirical measures with the same number
    of atoms

    :param mu: First empirical measure
    :type mu: EmpiricalMeasure
    :param nu: Second empirical measure
    :type nu: EmpiricalMeasure
    :param alpha: Exponent of the ground metric
    :type alpha: float
    :param exact: Ground distance mode, see :func:`distance`
    :type exact: Optional[bool]
    :param support_cap: Support size cap of the exact distance
    :type support_cap: int
    :param processes: Number of processes used for the cost matrix
    :type processes: int
    :return: (1/N) min over permutations sigma of sum_i d(f_i, g_sigma(i))
    :rtype: float
    :raises EnumerationSizeError: If there are more than 512 atoms
    :raises ValueError: If the atom counts differ

    .. note::

       With uniform weights and equal counts an optimal coupling is a permutation,
       so the transport problem is solved exactly with
       scipy.optimize.linear_sum_assignment.
    """
    if len(mu) != len(nu):
        raise ValueError(
            f"Empirical measures must have the same number of atoms, but received "
            f"{len(mu)} and {len(nu)}"
        )
    if len(mu) > MAX_ATOMS:
        raise EnumerationSizeError(
            f"Wasserstein distance is limited to {MAX_ATOMS} atoms, but received "
            f"{len(mu)}"
        )
    cost = distance_matrix(
        mu.atoms, nu.atoms, alpha, exact=exact, support_cap=support_cap, processes=processes
    )
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum() / len(mu))
