"""
Monte Carlo replicas of the polymer over independently seeded environments: free
energy series on a checkpoint grid, summaries against the annealed free energy,
inverse temperature scans, and the annealed identity E(Z_n) = exp(n lambda(beta)).
"""

# Standard Library Imports
from __future__ import annotations
import functools
import math
from typing import (
    Any,
    Callable,
    Dict,
    List,
    NamedTuple,
    Optional,
    Sequence,
    Tuple,
    Union,
)

# External Imports
import numpy as np
import pandas as pd

# Local Imports
from polylab.environment import (
    EnvironmentLaw,
    SeededField,
    check_beta,
    log_mgf,
    mean_eta,
)
from polylab.polymer.polymer_dp import (
    DEFAULT_LEDGER_WARN,
    DEFAULT_TAU_REL,
    PolymerState,
    checkpoint_grid,
    iterate_polymer,
)
from polylab.utils._parallel import REPLICA_FIELD_TAG, _derive_seed, _ordered_map
from polylab.walk import StepDistribution

SERIES_COLUMNS = ["seed", "n", "logZ", "F_n", "dropped_mass"]

# Called on every state after the first step, returns a record, a list of
# records, or None
Observer = Callable[[PolymerState], Union[None, Dict[str, Any], List[Dict[str, Any]]]]


class ReplicaResults(NamedTuple):
    """Results of a set of polymer replicas"""

    series: pd.DataFrame
    summary: Dict[str, float]
    observations: Optional[pd.DataFrame]


# region Replicas
def run_replicas(
    walk: StepDistribution,
    law: EnvironmentLaw,
    beta: float,
    n: int,
    num_seeds: int,
    base_seed: int = 0,
    tau_rel: Optional[float] = DEFAULT_TAU_REL,
    ledger_warn: float = DEFAULT_LEDGER_WARN,
    observer: Optional[Observer] = None,
    processes: int = 1,
    progress_bar: bool = False,
) -> ReplicaResults:
    """
    Run the polymer dynamic program on independently seeded environments

    :param walk: Step distribution of the reference walk
    :type walk: StepDistribution
    :param law: Environment law
    :type law: EnvironmentLaw
    :param beta: Inverse temperature, 0 < beta < beta_max(law)
    :type beta: float
    :param n: Number of steps, at least 1
    :type n: int
    :param num_seeds: Number of replicas, at least 1
    :type num_seeds: int
    :param base_seed: Base seed, replica i uses a field seeded by a child seed
        derived from (base_seed, i)
    :type base_seed: int
    :param tau_rel: Relative support truncation threshold, None to disable
    :type tau_rel: Optional[float]
    :param ledger_warn: Cumulative dropped mass warning threshold
    :type ledger_warn: float
    :param observer: Optional picklable callable applied to every state with n >= 1,
        the records it returns are collected in `observations` with the seed
        prepended
    :type observer: Optional[Observer]
    :param processes: Number of worker processes
    :type processes: int
    :param progress_bar: Whether to display a progress bar
    :type progress_bar: bool
    :return: Named tuple of the per seed free energy series (columns seed, n,
        logZ, F_n, dropped_mass at the checkpoint grid), the summary (beta, n,
        mean_F, se_F, lambda, gap), and the observer records
    :rtype: ReplicaResults
    """
    series, observations = _run_replica_tasks(
        walk=walk,
        law=law,
        betas=[beta],
        n=n,
        num_seeds=num_seeds,
        base_seed=base_seed,
        tau_rel=tau_rel,
        ledger_warn=ledger_warn,
        observer=observer,
        processes=processes,
        progress_bar=progress_bar,
    )
    series = series.drop(columns="beta")
    if observations is not None:
        observations = observations.drop(columns="beta")
    return ReplicaResults(
        series=series,
        summary=summarize_series(series, law, beta),
        observations=observations,
    )


def scan_replicas(
    walk: StepDistribution,
    law: EnvironmentLaw,
    betas: Sequence[float],
    n: int,
    num_seeds: int,
    base_seed: int = 0,
    tau_rel: Optional[float] = DEFAULT_TAU_REL,
    ledger_warn: float = DEFAULT_LEDGER_WARN,
    processes: int = 1,
    progress_bar: bool = False,
) -> Tuple[pd.DataFrame, pd.DataFrame]:
    """
    Run replicas over a grid of inverse temperatures, parallel across
    (beta, seed) tasks

    :param walk: Step distribution of the reference walk
    :type walk: StepDistribution
    :param law: Environment law
    :type law: EnvironmentLaw
    :param betas: Inverse temperatures, each in (0, beta_max(law))
    :type betas: Sequence[float]
    :param n: Number of steps
    :type n: int
    :param num_seeds: Number of replicas per inverse temperature
    :type num_seeds: int
    :param base_seed: Base seed, the same environments are used at every beta
    :type base_seed: int
    :param tau_rel: Relative support truncation threshold, None to disable
    :type tau_rel: Optional[float]
    :param ledger_warn: Cumulative dropped mass warning threshold
    :type ledger_warn: float
    :param processes: Number of worker processes
    :type processes: int
    :param progress_bar: Whether to display a progress bar
    :type progress_bar: bool
    :return: Tuple of the per (beta, seed) series, and the per beta table with
        columns beta, lambda, mean_F, se, gap, and the lower bound beta E(eta)
    :rtype: Tuple[pd.DataFrame, pd.DataFrame]
    """
    series, _ = _run_replica_tasks(
        walk=walk,
        law=law,
        betas=betas,
        n=n,
        num_seeds=num_seeds,
        base_seed=base_seed,
        tau_rel=tau_rel,
        ledger_warn=ledger_warn,
        observer=None,
        processes=processes,
        progress_bar=progress_bar,
    )
    rows = []
    for beta, group in series.groupby("beta", sort=True):
        summary = summarize_series(group, law, beta)
        rows.append(
            {
                "beta": summary["beta"],
                "lambda": summary["lambda"],
                "mean_F": summary["mean_F"],
                "se": summary["se_F"],
                "gap": summary["gap"],
                "lower_bound": summary["beta"] * mean_eta(law),
            }
        )
    return series, pd.DataFrame(rows)


def summarize_series(
    series: pd.DataFrame, law: EnvironmentLaw, beta: float
) -> Dict[str, float]:
    """
    Summarize the free energies of a replica series at its final time

    :param series: Replica series with columns n and F_n
    :type series: pd.DataFrame
    :param law: Environment law
    :type law: EnvironmentLaw
    :param beta: Inverse temperature of the series
    :type beta: float
    :return: Dictionary with beta, n, mean_F, se_F, lambda and gap = lambda - mean_F
    :rtype: Dict[str, float]
    """
    n = int(series["n"].max())
    final = series.loc[series["n"] == n, "F_n"].to_numpy()
    mean_f = float(final.mean())
    se_f = float(final.std(ddof=1) / math.sqrt(len(final))) if len(final) > 1 else 0.0
    lam = log_mgf(law, beta)
    return {
        "beta": float(beta),
        "n": n,
        "mean_F": mean_f,
        "se_F": se_f,
        "lambda": lam,
        "gap": lam - mean_f,
    }


def annealed_ratio(
    walk: StepDistribution,
    law: EnvironmentLaw,
    beta: float,
    n: int,
    num_seeds: int,
    base_seed: int = 0,
    processes: int = 1,
    progress_bar: bool = False,
) -> np.ndarray:
    """
    Per seed values of Z_n exp(-n lambda(beta)), whose expectation is exactly 1

    :param walk: Step distribution of the reference walk
    :type walk: StepDistribution
    :param law: Environment law
    :type law: EnvironmentLaw
    :param beta: Inverse temperature
    :type beta: float
    :param n: Number of steps
    :type n: int
    :param num_seeds: Number of replicas
    :type num_seeds: int
    :param base_seed: Base seed
    :type base_seed: int
    :param processes: Number of worker processes
    :type processes: int
    :param progress_bar: Whether to display a progress bar
    :type progress_bar: bool
    :return: Array of the normalized partition functions, one per seed
    :rtype: np.ndarray
    """
    series, _ = _run_replica_tasks(
        walk=walk,
        law=law,
        betas=[beta],
        n=n,
        num_seeds=num_seeds,
        base_seed=base_seed,
        tau_rel=None,
        ledger_warn=DEFAULT_LEDGER_WARN,
        observer=None,
        processes=processes,
        progress_bar=progress_bar,
    )
    final = series.loc[series["n"] == n, "logZ"].to_numpy()
    return np.exp(final - n * log_mgf(law, beta))


# endregion Replicas


# region Workers
def _run_replica_tasks(
    walk: StepDistribution,
    law: EnvironmentLaw,
    betas: Sequence[float],
    n: int,
    num_seeds: int,
    base_seed: int,
    tau_rel: Optional[float],
    ledger_warn: float,
    observer: Optional[Observer],
    processes: int,
    progress_bar: bool,
) -> Tuple[pd.DataFrame, Optional[pd.DataFrame]]:
    if n < 1:
        raise ValueError(f"n must be at least 1, but received {n}")
    if num_seeds < 1:
        raise ValueError(f"num_seeds must be at least 1, but received {num_seeds}")
    betas = [check_beta(law, b) for b in betas]
    seeds = [_derive_seed(base_seed, REPLICA_FIELD_TAG, i) for i in range(num_seeds)]
    tasks = [(beta, seed) for beta in betas for seed in seeds]
    results = _ordered_map(
        functools.partial(
            _replica_worker,
            walk=walk,
            law=law,
            n=n,
            tau_rel=tau_rel,
            ledger_warn=ledger_warn,
            observer=observer,
        ),
        tasks,
        processes=processes,
        progress_bar=progress_bar,
    )
    series_rows: List[Dict[str, Any]] = []
    observation_rows: List[Dict[str, Any]] = []
    for rows, observed in results:
        series_rows.extend(rows)
        observation_rows.extend(observed)
    series = pd.DataFrame(series_rows, columns=["beta"] + SERIES_COLUMNS)
    observations = pd.DataFrame(observation_rows) if observer is not None else None
    return series, observations


def _replica_worker(
    task: Tuple[float, int],
    walk: StepDistribution,
    law: EnvironmentLaw,
    n: int,
    tau_rel: Optional[float],
    ledger_warn: float,
    observer: Optional[Observer],
) -> Tuple[List[Dict[str, Any]], List[Dict[str, Any]]]:
    beta, seed = task
    field = SeededField(seed=seed, law=law)
    checkpoints = set(checkpoint_grid(n))
    rows = []
    observed = []
    for state in iterate_polymer(walk, field, beta, n, tau_rel, ledger_warn):
        if state.n == 0:
            continue
        if state.n in checkpoints:
            rows.append(
                {
                    "beta": beta,
                    "seed": seed,
                    "n": state.n,
                    "logZ": state.log_Z,
                    "F_n": state.log_Z / state.n,
                    "dropped_mass": state.dropped_mass,
                }
            )
        if observer is not None:
            records = observer(state)
            if isinstance(records, dict):
                records = [records]
            for record in records or ():
                observed.append({"beta": beta, "seed": seed, **record})
    return rows, observed


# endregion Workers
