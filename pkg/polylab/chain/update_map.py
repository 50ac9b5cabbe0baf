"""
The update map of the endpoint chain on the space of partitioned subprobability
measures. Given f and a fresh environment row eta_u, u in N x Z^d,

    F(u) = sum_{v ~ u} f(v) e^{beta eta_u} P(v, u) / D,
    D = sum_w sum_{v ~ w} f(v) e^{beta eta_w} P(v, w) + (1 - ||f||) e^{lambda(beta)},

where v ~ u means v and u are on the same level, so mass never moves across levels.
"""

# Standard Library Imports
from __future__ import annotations
import math
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

# External Imports
import numpy as np
from scipy.special import logsumexp

# Local Imports
from polylab.environment import (
    EnvironmentLaw,
    SeededField,
    beta_max,
    check_beta,
    log_mgf,
)
from polylab.pspm import Pspm
from polylab.utils.lattice import _convolve_sparse
from polylab.utils.polylab_exceptions import DomainError
from polylab.walk import StepDistribution

# Norms within this distance of 1 are treated as exactly 1 (no slack term)
NORM_TOL = 1e-12
# Levels outside the image of a coupling draw from streams offset by this much
_UNCOUPLED_STREAM_BASE = 2**20


# region Update Context
@dataclass(frozen=True)
class UpdateContext:
    """
    Parameters of the update map

    :param walk: Step distribution of the reference walk
    :type walk: StepDistribution
    :param beta: Inverse temperature
    :type beta: float
    :param law: Environment law
    :type law: EnvironmentLaw
    :param alpha: Metric exponent, with 0 < alpha beta < beta_max(law)
    :type alpha: float
    :param tau_rel: Relative truncation threshold applied to F, None to disable
    :type tau_rel: Optional[float]
    :param stream: Stream id of the environment rows, level n uses stream
        stream + n - 1
    :type stream: int
    """

    walk: StepDistribution
    beta: float
    law: EnvironmentLaw
    alpha: float = 2.0
    tau_rel: Optional[float] = None
    stream: int = 0
    lam: float = field(init=False)

    def __post_init__(self):
        check_beta(self.law, self.beta)
        if isinstance(self.alpha, bool) or not self.alpha > 1.0:
            raise ValueError(f"alpha must be greater than 1, but received {self.alpha}")
        if not self.alpha * self.beta < beta_max(self.law):
            raise DomainError(
                f"alpha * beta must be less than beta_max={beta_max(self.law)}, but "
                f"received alpha={self.alpha}, beta={self.beta}"
            )
        object.__setattr__(self, "lam", log_mgf(self.law, self.beta))

    def environment(self, seed: int) -> SeededField:
        """Environment field of this context with the given seed"""
        return SeededField(seed=seed, law=self.law, stream=self.stream)


def auto_alpha(beta: float, law: EnvironmentLaw) -> float:
    """
    Default metric exponent, 2 when beta_max is infinite, otherwise the midpoint
    (1 + beta_max/beta)/2 clamped to at most 2

    :param beta: Inverse temperature
    :type beta: float
    :param law: Environment law
    :type law: EnvironmentLaw
    :return: alpha > 1 with alpha beta < beta_max
    :rtype: float
    """
    beta = check_beta(law, beta)
    b_max = beta_max(law)
    if math.isinf(b_max):
        return 2.0
    return min(2.0, 0.5 * (1.0 + b_max / beta))


# endregion Update Context

# region Environment Rows


@dataclass(frozen=True)
class EnvironmentRow:
    """
    One time slice eta_u, u = (level, x), of the environment. Level n reads the
    field's stream n - 1 at the given time, so level 1 sees the same values as the
    polymer dynamic program on the same field.

    :param field: Environment field
    :type field: SeededField
    :param time: Time index, at least 1
    :type time: int
    """

    field: SeededField
    time: int = 1

    def values(self, level: int, sites: np.ndarray) -> np.ndarray:
        return self.level_field(level).evaluate_sites(self.time, sites)

    def level_field(self, level: int) -> SeededField:
        return self.field.with_stream(self.field.stream + int(level) - 1)


@dataclass(frozen=True, init=False)
class TranslatedRow:
    """
    Environment row coupled to another through a level bijection sigma and
    translations x_n, zeta_u = eta_{psi^-1(u)} with psi(n, x) = (sigma(n), x - x_n).
    Levels outside the image of sigma get independent values.

    :param row: Row being translated
    :type row: EnvironmentRow
    :param sigma: Level bijection, keyed by source level
    :type sigma: Mapping[int, int]
    :param offsets: Translation x_n for each source level
    :type offsets: Mapping[int, Sequence[int]]
    """

    row: EnvironmentRow
    sigma: Tuple[Tuple[int, int], ...]
    offsets: Tuple[Tuple[int, Tuple[int, ...]], ...]

    def __init__(
        self,
        row: EnvironmentRow,
        sigma: Mapping[int, int],
        offsets: Mapping[int, Sequence[int]],
    ):
        object.__setattr__(self, "row", row)
        object.__setattr__(self, "sigma", tuple(sorted((int(k), int(v)) for k, v in sigma.items())))
        object.__setattr__(
            self,
            "offsets",
            tuple(
                sorted(
                    (int(k), tuple(int(c) for c in np.atleast_1d(v)))
                    for k, v in offsets.items()
                )
            ),
        )

    def values(self, level: int, sites: np.ndarray) -> np.ndarray:
        inverse = {v: k for k, v in self.sigma}
        if level not in inverse:
            uncoupled = self.row.field.with_stream(
                self.row.field.stream + _UNCOUPLED_STREAM_BASE + int(level)
            )
            return uncoupled.evaluate_sites(self.row.time, sites)
        source = inverse[level]
        offset = np.asarray(dict(self.offsets).get(source, (0,) * sites.shape[1]))
        return self.row.values(source, sites + offset)


Row = Union[EnvironmentRow, TranslatedRow]


# endregion Environment Rows

# region Update


def apply_update(
    f: Pspm, ctx: UpdateContext, row: Union[Row, int]
) -> Tuple[Pspm, float]:
    """
    Sample the update F of f

    :param f: Current Pspm
    :type f: Pspm
    :param ctx: Update parameters
    :type ctx: UpdateContext
    :param row: Environment row, or an integer seed for a fresh row at time 1
    :type row: Union[Row, int]
    :return: Tuple of (F, log D)
    :rtype: Tuple[Pspm, float]

    .. note::

       The zero measure is a fixed point, its update is the zero measure with
       log D = lambda(beta) exactly. When ||f|| = 1 and f sits on level 1, log D
       is the increment log(Z_n/Z_{n-1}) of the polymer on the same environment.
    """
    F, log_ratio, _ = _update(f, ctx, row)
    return F, log_ratio


def _update(f: Pspm, ctx: UpdateContext, row: Union[Row, int]) -> Tuple[Pspm, float, float]:
    if isinstance(row, (int, np.integer)):
        row = EnvironmentRow(ctx.environment(int(row)), time=1)
    if len(f) == 0:
        return f, ctx.lam, 0.0
    levels, sites, log_num = _log_numerators(f, ctx, row)
    slack = 1.0 - f.norm
    terms = log_num
    if slack > NORM_TOL:
        terms = np.append(log_num, math.log(slack) + ctx.lam)
    log_d = float(logsumexp(terms))
    masses = np.exp(log_num - log_d)
    dropped = 0.0
    if ctx.tau_rel:
        keep = masses >= ctx.tau_rel * masses.max()
        if not keep.all():
            dropped = float(masses[~keep].sum())
            levels, sites, masses = levels[keep], sites[keep], masses[keep]
    return Pspm(levels=levels, sites=sites, masses=masses), log_d, dropped


def _log_numerators(
    f: Pspm, ctx: UpdateContext, row: Row
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Per level convolution of f with the walk, plus beta eta at the new sites
    levels: List[np.ndarray] = []
    sites: List[np.ndarray] = []
    log_num: List[np.ndarray] = []
    for level, lv_sites, conv in _level_convolutions(f, ctx.walk):
        levels.append(np.full(lv_sites.shape[0], level, dtype=np.int64))
        sites.append(lv_sites)
        log_num.append(np.log(conv) + ctx.beta * row.values(level, lv_sites))
    return np.concatenate(levels), np.concatenate(sites), np.concatenate(log_num)


def _level_convolutions(f: Pspm, walk: StepDistribution):
    if f.d != walk.d:
        raise ValueError(f"Pspm has dimension {f.d} but the walk has dimension {walk.d}")
    for level in f.level_set():
        mask = f.levels == level
        lv_sites, conv = _convolve_sparse(f.sites[mask], f.masses[mask], walk.steps, walk.probs)
        yield level, lv_sites, conv


# endregion Update
