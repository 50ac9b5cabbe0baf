"""
Sparse log-domain dynamic programming for the point-to-line partition function of a
directed polymer, Z_n(x) = sum_y Z_{n-1}(y) P(y, x) exp(beta eta(n, x)), its total
Z_n, the free energy F_n = log(Z_n)/n, and the endpoint distribution
f_n(x) = Z_n(x)/Z_n.
"""

# Standard Library Imports
from __future__ import annotations
import warnings
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

# External Imports
import numpy as np
from numpy.typing import NDArray
from scipy.special import logsumexp

# Local Imports
from polylab.environment import SeededField, check_beta
from polylab.utils.lattice import LatticePmf, _convolve_sparse
from polylab.walk import StepDistribution

DEFAULT_TAU_REL = 1e-14
DEFAULT_LEDGER_WARN = 1e-6


# region Polymer State
@dataclass(frozen=True, eq=False)
class PolymerState:
    """
    State of the partition function dynamic program at time n

    :param n: Time step
    :type n: int
    :param sites: Sites carrying weight, integer array of shape (m, d) sorted
        lexicographically
    :type sites: NDArray[np.int64]
    :param log_weights: log Z_n(x) for each site, shape (m,)
    :type log_weights: NDArray[np.float64]
    :param log_Z: log Z_n
    :type log_Z: float
    :param dropped_mass: Cumulative endpoint mass removed by support truncation
    :type dropped_mass: float
    :param last_dropped: Endpoint mass removed by truncation in the last advance
    :type last_dropped: float
    """

    n: int
    sites: NDArray[np.int64]
    log_weights: NDArray[np.float64]
    log_Z: float
    dropped_mass: float = 0.0
    last_dropped: float = 0.0

    @property
    def d(self) -> int:
        return self.sites.shape[1]

    def __len__(self) -> int:
        return self.log_weights.shape[0]


def init_state(d: int = 1, origin: Optional[Sequence[int]] = None) -> PolymerState:
    """
    Initial state, Z_0 = delta_origin

    :param d: Lattice dimension
    :type d: int
    :param origin: Starting site of the walk, defaults to the origin of Z^d
    :type origin: Optional[Sequence[int]]
    :return: State at n=0 with unit mass at the starting site, log_Z = 0
    :rtype: PolymerState
    """
    start = np.zeros((1, d), dtype=np.int64)
    if origin is not None:
        start[0] = np.asarray(origin, dtype=np.int64).reshape(d)
    return PolymerState(n=0, sites=start, log_weights=np.zeros(1), log_Z=0.0)


# endregion Polymer State

# region Dynamic Program


def advance(
    state: PolymerState,
    walk: StepDistribution,
    field: SeededField,
    beta: float,
    tau_rel: Optional[float] = DEFAULT_TAU_REL,
    ledger_warn: float = DEFAULT_LEDGER_WARN,
) -> PolymerState:
    """
    Advance the partition function by one step

    :param state: Current state at time n-1
    :type state: PolymerState
    :param walk: Step distribution of the reference walk
    :type walk: StepDistribution
    :param field: Environment, the step to time n reads eta(n, .)
    :type field: SeededField
    :param beta: Inverse temperature, 0 < beta < beta_max(field.law)
    :type beta: float
    :param tau_rel: Relative truncation threshold, after the step sites with
        f_n(x) < tau_rel * max f_n are dropped. None or 0 disables truncation.
    :type tau_rel: Optional[float]
    :param ledger_warn: A warning is emitted when the cumulative dropped mass first
        exceeds this value
    :type ledger_warn: float
    :return: State at time n
    :rtype: PolymerState
    :raises DomainError: If beta is outside (0, beta_max)

    .. note::

       log_Z is taken before truncation, so after a truncating step the endpoint
       distribution sums to 1 - last_dropped.
    """
    beta = check_beta(field.law, beta)
    if state.d != walk.d:
        raise ValueError(
            f"State has dimension {state.d} but the walk has dimension {walk.d}"
        )
    n = state.n + 1
    shift = state.log_weights.max()
    sites, mass = _convolve_sparse(
        state.sites, np.exp(state.log_weights - shift), walk.steps, walk.probs
    )
    log_weights = np.log(mass) + shift + beta * field.evaluate_sites(n, sites)
    log_Z = float(logsumexp(log_weights))
    dropped = 0.0
    if tau_rel:
        rel = np.exp(log_weights - log_Z)
        keep = rel >= tau_rel * rel.max()
        if not keep.all():
            dropped = float(rel[~keep].sum())
            sites, log_weights = sites[keep], log_weights[keep]
    cumulative = state.dropped_mass + dropped
    if state.dropped_mass <= ledger_warn < cumulative:
        warnings.warn(
            f"Cumulative truncated endpoint mass {cumulative:.3e} exceeds "
            f"{ledger_warn:.1e} at n={n}, lower tau_rel to reduce truncation bias"
        )
    return PolymerState(
        n=n,
        sites=sites,
        log_weights=log_weights,
        log_Z=log_Z,
        dropped_mass=cumulative,
        last_dropped=dropped,
    )


def iterate_polymer(
    walk: StepDistribution,
    field: SeededField,
    beta: float,
    n: int,
    tau_rel: Optional[float] = DEFAULT_TAU_REL,
    ledger_warn: float = DEFAULT_LEDGER_WARN,
    state: Optional[PolymerState] = None,
) -> Iterator[PolymerState]:
    """
    Generate the successive states of the dynamic program

    :param walk: Step distribution of the reference walk
    :type walk: StepDistribution
    :param field: Environment
    :type field: SeededField
    :param beta: Inverse temperature
    :type beta: float
    :param n: Number of steps
    :type n: int
    :param tau_rel: Relative truncation threshold, see :func:`advance`
    :type tau_rel: Optional[float]
    :param ledger_warn: Cumulative dropped mass warning threshold
    :type ledger_warn: float
    :param state: Starting state, defaults to init_state(walk.d)
    :type state: Optional[PolymerState]
    :return: Iterator over the states, starting with the initial state
    :rtype: Iterator[PolymerState]
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, but received {n}")
    state = init_state(walk.d) if state is None else state
    yield state
    for _ in range(n):
        state = advance(state, walk, field, beta, tau_rel, ledger_warn)
        yield state


def run_polymer(
    walk: StepDistribution,
    field: SeededField,
    beta: float,
    n: int,
    tau_rel: Optional[float] = DEFAULT_TAU_REL,
    ledger_warn: float = DEFAULT_LEDGER_WARN,
) -> PolymerState:
    """Run the dynamic program for n steps from the origin and return the final
    state"""
    state = None
    for state in iterate_polymer(walk, field, beta, n, tau_rel, ledger_warn):
        pass
    return state


def free_energy(state: PolymerState) -> float:
    """
    Free energy F_n = log(Z_n)/n

    :param state: Polymer state with n >= 1
    :type state: PolymerState
    :return: F_n
    :rtype: float
    :raises ValueError: At n=0, where F_n is undefined
    """
    if state.n < 1:
        raise ValueError(
            f"Free energy is only defined for n >= 1, but received a state at n={state.n}"
        )
    return state.log_Z / state.n


def endpoint_distribution(state: PolymerState) -> LatticePmf:
    """
    Endpoint distribution f_n(x) = Z_n(x)/Z_n

    :param state: Polymer state
    :type state: PolymerState
    :return: Endpoint pmf, sums to 1 - state.last_dropped
    :rtype: LatticePmf
    """
    return LatticePmf(
        sites=state.sites.copy(), probs=np.exp(state.log_weights - state.log_Z)
    )


def checkpoint_grid(n: int) -> List[int]:
    """
    Logarithmic checkpoint grid, the powers of 2 up to n followed by n

    :param n: Final time, at least 1
    :type n: int
    :return: Sorted checkpoint times
    :rtype: List[int]
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, but received {n}")
    grid = [2**k for k in range(int(n).bit_length()) if 2**k <= n]
    if grid[-1] != n:
        grid.append(int(n))
    return grid


# endregion Dynamic Program
