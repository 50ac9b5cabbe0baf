"""
Monte Carlo estimates of the energy functional R(f) = E log D(f), where D is the
denominator of the update map, its lift to measures on the space of Pspms, and the
moment bounds on D used to control the chain.
"""

# Standard Library Imports
from __future__ import annotations
import math
from typing import NamedTuple, Tuple

# External Imports
import numpy as np
from scipy.special import logsumexp

# Local Imports
from polylab.chain.update_map import (
    NORM_TOL,
    EnvironmentRow,
    UpdateContext,
    _level_convolutions,
)
from polylab.environment import log_mgf
from polylab.pspm import EmpiricalMeasure, Pspm
from polylab.utils._parallel import ENERGY_ROWS_TAG, _derive_seed
from polylab.utils.polylab_exceptions import MassError

# Largest number of (row, site) environment values generated at once
_CHUNK_VALUES = 2**22


class MomentCheck(NamedTuple):
    """Monte Carlo moment estimate alongside its theoretical bound"""

    estimate: float
    se: float
    bound: float


# region Energy Functional
def energy_R(
    f: Pspm, ctx: UpdateContext, samples: int = 10_000, seed: int = 0
) -> Tuple[float, float]:
    """
    Estimate R(f) = E log D over independent environment rows

    :param f: Pspm
    :type f: Pspm
    :param ctx: Update parameters
    :type ctx: UpdateContext
    :param samples: Number M of independent rows, at least 2
    :type samples: int
    :param seed: Seed of the environment rows
    :type seed: int
    :return: Tuple of (estimate, standard error)
    :rtype: Tuple[float, float]

    .. note::

       R(0) = lambda(beta) exactly, returned without sampling with a standard
       error of 0. For any other f the estimate sits strictly below lambda(beta)
       by Jensen's inequality.
    """
    _check_samples(samples)
    if len(f) == 0:
        return ctx.lam, 0.0
    log_d = _log_denominators(f, ctx, samples, seed)
    return _mean_se(log_d)


def lifted_R(
    mu: EmpiricalMeasure, ctx: UpdateContext, samples: int = 10_000, seed: int = 0
) -> Tuple[float, float]:
    """
    Estimate the lift of R to an empirical measure, the average of R over its atoms

    :param mu: Empirical measure of Pspms
    :type mu: EmpiricalMeasure
    :param ctx: Update parameters
    :type ctx: UpdateContext
    :param samples: Rows per atom
    :type samples: int
    :param seed: Base seed, atom j uses an independent derived stream
    :type seed: int
    :return: Tuple of (estimate, standard error), with the per atom standard errors
        combined in quadrature
    :rtype: Tuple[float, float]
    """
    estimates = np.empty(len(mu))
    ses = np.empty(len(mu))
    for j, f in enumerate(mu.atoms):
        estimates[j], ses[j] = energy_R(
            f, ctx, samples, _derive_seed(seed, ENERGY_ROWS_TAG, j)
        )
    return float(estimates.mean()), float(np.sqrt(np.sum(ses**2)) / len(mu))


# endregion Energy Functional

# region Moment Checks


def fourth_moment_check(
    f: Pspm, ctx: UpdateContext, samples: int = 10_000, seed: int = 0
) -> MomentCheck:
    """
    Estimate the centered fourth moment of W = log D for a unit norm f, and the
    bound 32 * 5 * (e^lambda(-beta) + e^lambda(beta)) it must satisfy

    :param f: Pspm with norm 1
    :type f: Pspm
    :param ctx: Update parameters
    :type ctx: UpdateContext
    :param samples: Number of rows
    :type samples: int
    :param seed: Seed of the rows
    :type seed: int
    :return: Estimate of E(W - EW)^4, its standard error, and the bound
    :rtype: MomentCheck
    :raises MassError: If the norm of f is not 1
    """
    _check_samples(samples)
    if abs(f.norm - 1.0) > NORM_TOL:
        raise MassError(f"f must have norm 1, but received norm {f.norm!r}")
    bound = 160.0 * (math.exp(log_mgf(ctx.law, -ctx.beta)) + math.exp(ctx.lam))
    w = _log_denominators(f, ctx, samples, seed)
    centered = (w - w.mean()) ** 4
    estimate, se = _mean_se(centered)
    return MomentCheck(estimate=estimate, se=se, bound=bound)


def inverse_moment_check(
    f: Pspm, ctx: UpdateContext, samples: int = 10_000, seed: int = 0
) -> MomentCheck:
    """
    Estimate E D^(-alpha) and the bound 2^alpha e^lambda(-alpha beta)

    :param f: Pspm
    :type f: Pspm
    :param ctx: Update parameters, alpha is taken from the context
    :type ctx: UpdateContext
    :param samples: Number of rows
    :type samples: int
    :param seed: Seed of the rows
    :type seed: int
    :return: Estimate, its standard error, and the bound
    :rtype: MomentCheck
    """
    _check_samples(samples)
    bound = 2.0**ctx.alpha * math.exp(log_mgf(ctx.law, -ctx.alpha * ctx.beta))
    if len(f) == 0:
        value = math.exp(-ctx.alpha * ctx.lam)
        return MomentCheck(estimate=value, se=0.0, bound=bound)
    log_d = _log_denominators(f, ctx, samples, seed)
    estimate, se = _mean_se(np.exp(-ctx.alpha * log_d))
    return MomentCheck(estimate=estimate, se=se, bound=bound)


# endregion Moment Checks

# region Helper Functions


def _check_samples(samples: int):
    if isinstance(samples, bool) or int(samples) != samples or samples < 2:
        raise ValueError(f"samples must be an integer >= 2, but received {samples}")


def _mean_se(values: np.ndarray) -> Tuple[float, float]:
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.shape[0]))


def _log_denominators(
    f: Pspm, ctx: UpdateContext, samples: int, seed: int
) -> np.ndarray:
    """
    log D for rows at times 1..samples of the field seeded by seed, shape (samples,)
    """
    row = EnvironmentRow(ctx.environment(seed))
    convolutions = list(_level_convolutions(f, ctx.walk))
    log_conv = [(level, sites, np.log(conv)) for level, sites, conv in convolutions]
    support = sum(sites.shape[0] for _, sites, _ in log_conv)
    slack = 1.0 - f.norm
    log_slack = math.log(slack) + ctx.lam if slack > NORM_TOL else None
    chunk = max(1, _CHUNK_VALUES // max(support, 1))
    out = np.empty(samples)
    for start in range(0, samples, chunk):
        times = np.arange(start + 1, min(start + chunk, samples) + 1)
        terms = [
            lc[None, :] + ctx.beta * row.level_field(level).evaluate_grid(times, sites)
            for level, sites, lc in log_conv
        ]
        if log_slack is not None:
            terms.append(np.full((times.shape[0], 1), log_slack))
        out[start : start + times.shape[0]] = logsumexp(
            np.concatenate(terms, axis=1), axis=1
        )
    return out


# endregion Helper Functions
