"""
The endpoint chain f_0 -> f_1 -> ... on the space of Pspms, driven by the update map
over a seeded environment, with diagnostics comparing its empirical measure
mu_n = (1/(n+1)) sum_i delta_{f_i} to the fixed points of the lifted update and the
free energy to the lifted energy functional.
"""

# Standard Library Imports
from __future__ import annotations
import functools
import math
import warnings
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

# External Imports
import numpy as np
import pandas as pd
from tqdm import tqdm

# Local Imports
from polylab.chain.energy_functions import lifted_R
from polylab.chain.update_map import EnvironmentRow, UpdateContext, _update, apply_update
from polylab.polymer.polymer_dp import DEFAULT_LEDGER_WARN
from polylab.pspm import EmpiricalMeasure, Pspm, embed, truncate, wasserstein
from polylab.utils._parallel import (
    CHAIN_FIELD_TAG,
    ENERGY_ROWS_TAG,
    SUBSAMPLE_TAG,
    UPDATE_ROWS_TAG,
    _derive_seed,
    _ordered_map,
)

DEFAULT_SUBSAMPLE = 64
DEFAULT_KEEP = 32
TOP_ATOMS = 8

VARIATIONAL_COLUMNS = [
    "seed",
    "n",
    "lambda",
    "F_n",
    "R_hat",
    "R_se",
    "lambda_minus_F",
    "R_minus_F",
]


# region Trajectory
@dataclass(frozen=True, eq=False)
class ChainTrajectory:
    """
    States of one run of the endpoint chain

    :param states: The states f_0, ..., f_n
    :type states: Tuple[Pspm, ...]
    :param log_ratios: Increments log D_i for i = 1..n, shape (n,)
    :type log_ratios: np.ndarray
    :param dropped_mass: Mass removed by truncation at each step, shape (n,)
    :type dropped_mass: np.ndarray
    """

    states: Tuple[Pspm, ...]
    log_ratios: np.ndarray
    dropped_mass: np.ndarray

    @property
    def n(self) -> int:
        return len(self.states) - 1

    def empirical_measure(self, upto: Optional[int] = None) -> EmpiricalMeasure:
        """Empirical measure mu_upto of f_0..f_upto, defaults to the whole run"""
        upto = self.n if upto is None else upto
        if not 0 <= upto <= self.n:
            raise ValueError(f"upto must be between 0 and {self.n}, but received {upto}")
        return EmpiricalMeasure(self.states[: upto + 1])

    def free_energy(self, upto: Optional[int] = None) -> float:
        """Running mean of the increments, (1/n) log Z_n"""
        upto = self.n if upto is None else upto
        if not 1 <= upto <= self.n:
            raise ValueError(f"upto must be between 1 and {self.n}, but received {upto}")
        return float(self.log_ratios[:upto].mean())

    def to_records(self, top: int = TOP_ATOMS) -> List[Dict[str, Any]]:
        """One record per step, {i, logRatio, norm, top_atoms}"""
        return [
            {
                "i": i,
                "logRatio": float(self.log_ratios[i - 1]),
                "norm": self.states[i].norm,
                "top_atoms": [[lv, list(x), m] for lv, x, m in self.states[i].top_atoms(top)],
            }
            for i in range(1, self.n + 1)
        ]


def run_chain(
    ctx: UpdateContext,
    n: int,
    field_seed: int,
    initial: Optional[Pspm] = None,
    ledger_warn: float = DEFAULT_LEDGER_WARN,
    progress_bar: bool = False,
) -> ChainTrajectory:
    """
    Run the endpoint chain for n steps

    :param ctx: Update parameters
    :type ctx: UpdateContext
    :param n: Number of steps, non-negative
    :type n: int
    :param field_seed: Seed of the environment, step i reads the row at time i
    :type field_seed: int
    :param initial: Starting state, defaults to the point mass at the origin on
        level 1
    :type initial: Optional[Pspm]
    :param ledger_warn: A warning is emitted when the cumulative truncated mass first
        exceeds this value
    :type ledger_warn: float
    :param progress_bar: Whether to display a progress bar
    :type progress_bar: bool
    :return: The trajectory
    :rtype: ChainTrajectory

    .. note::

       With truncation off and the default start, the increments are those of the
       polymer dynamic program on the same field, so their sum is log Z_n.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, but received {n}")
    state = embed({(0,) * ctx.walk.d: 1.0}) if initial is None else initial
    field = ctx.environment(field_seed)
    states = [state]
    log_ratios = np.empty(n)
    dropped = np.zeros(n)
    for i in tqdm(range(1, n + 1), disable=not progress_bar):
        state, log_ratios[i - 1], dropped[i - 1] = _update(
            state, ctx, EnvironmentRow(field, time=i)
        )
        states.append(state)
        cumulative = dropped[:i].sum()
        if cumulative - dropped[i - 1] <= ledger_warn < cumulative:
            warnings.warn(
                f"Cumulative truncated chain mass {cumulative:.3e} exceeds "
                f"{ledger_warn:.1e} at i={i}, lower tau_rel to reduce truncation bias"
            )
    for arr in (log_ratios, dropped):
        arr.setflags(write=False)
    return ChainTrajectory(states=tuple(states), log_ratios=log_ratios, dropped_mass=dropped)


# endregion Trajectory

# region Diagnostics


def stationarity_gap(
    trajectory: ChainTrajectory,
    ctx: UpdateContext,
    m: int = DEFAULT_SUBSAMPLE,
    samples_per_atom: int = 1,
    keep: int = DEFAULT_KEEP,
    seed: int = 0,
    upto: Optional[int] = None,
    exact: Optional[bool] = None,
    processes: int = 1,
) -> float:
    """
    Estimate how far the empirical measure of the chain is from being a fixed point
    of the lifted update, W_alpha(mu, T mu) for a uniform subsample mu of mu_n

    :param trajectory: Chain trajectory
    :type trajectory: ChainTrajectory
    :param ctx: Update parameters, alpha is the exponent of the ground metric
    :type ctx: UpdateContext
    :param m: Number of atoms subsampled (without replacement) from mu_n
    :type m: int
    :param samples_per_atom: Updates sampled per atom, each atom is repeated this
        many times in the subsample
    :type samples_per_atom: int
    :param keep: Atoms and their updates are truncated to their `keep` largest
        masses before distances are evaluated
    :type keep: int
    :param seed: Seed of the subsample and the update rows
    :type seed: int
    :param upto: Use mu_upto instead of the whole trajectory
    :type upto: Optional[int]
    :param exact: Ground distance mode, see :func:`polylab.pspm.distance`
    :type exact: Optional[bool]
    :param processes: Number of processes used for the distance matrix
    :type processes: int
    :return: Assignment based Wasserstein estimate
    :rtype: float
    """
    mu = trajectory.empirical_measure(upto)
    if not 1 <= m <= len(mu):
        raise ValueError(
            f"m must be between 1 and the trajectory length {len(mu)}, but received {m}"
        )
    if samples_per_atom < 1:
        raise ValueError(
            f"samples_per_atom must be at least 1, but received {samples_per_atom}"
        )
    rng = np.random.default_rng(_derive_seed(seed, SUBSAMPLE_TAG, 0))
    chosen = np.sort(rng.choice(len(mu), size=m, replace=False))
    sources = []
    images = []
    for j, idx in enumerate(chosen):
        f = mu.atoms[idx]
        for s in range(samples_per_atom):
            row_seed = _derive_seed(seed, UPDATE_ROWS_TAG, j * samples_per_atom + s)
            image, _ = apply_update(f, ctx, row_seed)
            sources.append(truncate(f, keep))
            images.append(truncate(image, keep))
    return wasserstein(
        EmpiricalMeasure(sources),
        EmpiricalMeasure(images),
        ctx.alpha,
        exact=exact,
        processes=processes,
    )


def variational_gap(
    ctx: UpdateContext,
    n: int,
    seeds: Union[int, Sequence[int]],
    base_seed: int = 0,
    subsample: int = DEFAULT_SUBSAMPLE,
    energy_samples: int = 10_000,
    processes: int = 1,
    progress_bar: bool = False,
) -> Tuple[pd.DataFrame, Dict[str, float]]:
    """
    Compare the free energy F_n of independent chains with the annealed free energy
    lambda(beta) and with the lifted energy functional of mu_{n-1}

    :param ctx: Update parameters
    :type ctx: UpdateContext
    :param n: Number of steps per chain, at least 1
    :type n: int
    :param seeds: Number of chains, or the explicit chain indices
    :type seeds: Union[int, Sequence[int]]
    :param base_seed: Base seed, chain k uses derived field and row streams
    :type base_seed: int
    :param subsample: Atoms of mu_{n-1} used to estimate its lifted energy
    :type subsample: int
    :param energy_samples: Environment rows per atom
    :type energy_samples: int
    :param processes: Number of processes, chains run in parallel
    :type processes: int
    :param progress_bar: Whether to display a progress bar
    :type progress_bar: bool
    :return: Per chain DataFrame with the columns of VARIATIONAL_COLUMNS, and a
        summary dict
    :rtype: Tuple[pd.DataFrame, Dict[str, float]]

    .. note::

       E R(mu_{n-1}) = E F_n, so |R_hat - F_n| should be small, and both lie below
       lambda(beta), strictly so in the localized phase.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, but received {n}")
    indices = list(range(seeds)) if isinstance(seeds, (int, np.integer)) else list(seeds)
    if not indices:
        raise ValueError("Need at least one seed")
    rows = _ordered_map(
        functools.partial(
            _variational_worker,
            ctx=ctx,
            n=n,
            base_seed=base_seed,
            subsample=subsample,
            energy_samples=energy_samples,
        ),
        indices,
        processes=processes,
        progress_bar=progress_bar,
    )
    results = pd.DataFrame(rows, columns=VARIATIONAL_COLUMNS)
    count = len(results)
    se_f = float(results["F_n"].std(ddof=1) / math.sqrt(count)) if count > 1 else math.nan
    summary = {
        "beta": ctx.beta,
        "alpha": ctx.alpha,
        "n": n,
        "lambda": ctx.lam,
        "mean_F": float(results["F_n"].mean()),
        "se_F": se_f,
        "mean_R": float(results["R_hat"].mean()),
        "se_R": float(np.sqrt(np.sum(results["R_se"] ** 2)) / count),
        "mean_abs_R_minus_F": float(results["R_minus_F"].abs().mean()),
    }
    return results, summary


def trajectory_energy(
    trajectory: ChainTrajectory,
    ctx: UpdateContext,
    subsample: int = DEFAULT_SUBSAMPLE,
    energy_samples: int = 10_000,
    seed: int = 0,
) -> Tuple[float, float]:
    """
    Estimate the lifted energy of mu_{n-1}, the empirical measure of all but the
    last state, whose expectation equals the expected free energy E F_n

    :param trajectory: Chain trajectory with at least one step
    :type trajectory: ChainTrajectory
    :param ctx: Update parameters
    :type ctx: UpdateContext
    :param subsample: Atoms drawn uniformly without replacement from mu_{n-1},
        all atoms are used when there are no more than this
    :type subsample: int
    :param energy_samples: Environment rows per atom
    :type energy_samples: int
    :param seed: Seed of the subsample and the rows
    :type seed: int
    :return: Tuple of (estimate, standard error)
    :rtype: Tuple[float, float]
    """
    if trajectory.n < 1:
        raise ValueError("The trajectory must have at least one step")
    mu = trajectory.empirical_measure(trajectory.n - 1)
    if subsample < len(mu):
        rng = np.random.default_rng(_derive_seed(seed, SUBSAMPLE_TAG, 0))
        chosen = np.sort(rng.choice(len(mu), size=subsample, replace=False))
        mu = EmpiricalMeasure([mu.atoms[i] for i in chosen])
    return lifted_R(mu, ctx, energy_samples, seed)


def _variational_worker(
    index: int,
    ctx: UpdateContext,
    n: int,
    base_seed: int,
    subsample: int,
    energy_samples: int,
) -> Dict[str, float]:
    field_seed = _derive_seed(base_seed, CHAIN_FIELD_TAG, index)
    trajectory = run_chain(ctx, n, field_seed)
    f_n = trajectory.free_energy()
    r_hat, r_se = trajectory_energy(
        trajectory,
        ctx,
        subsample,
        energy_samples,
        _derive_seed(base_seed, ENERGY_ROWS_TAG, index),
    )
    return {
        "seed": field_seed,
        "n": n,
        "lambda": ctx.lam,
        "F_n": f_n,
        "R_hat": r_hat,
        "R_se": r_se,
        "lambda_minus_F": ctx.lam - f_n,
        "R_minus_F": r_hat - f_n,
    }


# endregion Diagnostics
