"""
Localization order parameters of endpoint distributions: epsilon-atom sets and their
mass, time averages of the atomic mass (asymptotic pure atomicity), the geometric
indicator that mass 1 - delta fits in a set of l1-diameter at most K, and the
entropy criterion for localization.
"""

# Standard Library Imports
from __future__ import annotations
import math
from typing import (
    Any,
    Dict,
    List,
    Mapping,
    NamedTuple,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

# External Imports
import numpy as np
import pandas as pd
from scipy.spatial import KDTree
from scipy.special import comb

# Local Imports
from polylab.environment import EnvironmentLaw, check_beta, log_mgf, log_mgf_prime
from polylab.polymer.polymer_dp import PolymerState, endpoint_distribution
from polylab.utils.lattice import LatticePmf, _as_lattice_pmf
from polylab.walk import StepDistribution, entropy

SERIES_COLUMNS = ["i", "eps_i", "atomic_mass", "max_atom", "geo_flag", "window_mass"]

# Largest number of support sites placed in the search tree of the d >= 2 indicator
MAX_TREE_SITES = 50_000
# Largest number of ball centres tried by the d >= 2 indicator
MAX_CENTRES = 1024

Pmf = Union[LatticePmf, Mapping]


class GeoIndicator(NamedTuple):
    """
    Geometric localization indicator. `exact` is False when window_mass is only a
    lower bound on the largest mass of a diameter K set (d >= 2).
    """

    flag: bool
    window_mass: float
    exact: bool


class SufficientCondition(NamedTuple):
    """Entropy criterion beta lambda'(beta) - lambda(beta) > H(P)"""

    holds: bool
    lhs: float
    rhs: float


# region Atoms
def atom_set(f: Pmf, eps: float) -> Set[Tuple[int, ...]]:
    """
    Sites carrying more than eps of the mass

    :param f: Mass function on Z^d
    :type f: Union[LatticePmf, Mapping]
    :param eps: Threshold, 0 <= eps < 1
    :type eps: float
    :return: {x : f(x) > eps}, strict inequality
    :rtype: Set[Tuple[int, ...]]
    """
    f = _as_lattice_pmf(f)
    _check_eps(eps)
    mask = f.probs > eps
    return {tuple(int(c) for c in x) for x in f.sites[mask]}


def atomic_mass(f: Pmf, eps: float) -> float:
    """Total mass of the eps-atom set, sum of f(x) over f(x) > eps"""
    f = _as_lattice_pmf(f)
    _check_eps(eps)
    return float(f.probs[f.probs > eps].sum())


def apa_average(series: Sequence[Pmf], eps_schedule: Sequence[float]) -> float:
    """
    Time average of the atomic mass, (1/n) sum_i atomic_mass(f_i, eps_i)

    :param series: Endpoint distributions f_0, ..., f_{n-1}
    :type series: Sequence[Union[LatticePmf, Mapping]]
    :param eps_schedule: Thresholds eps_i, at least as long as series
    :type eps_schedule: Sequence[float]
    :return: The average
    :rtype: float
    """
    if len(series) == 0:
        raise ValueError("Need at least one distribution")
    if len(eps_schedule) < len(series):
        raise ValueError(
            f"eps_schedule must have at least {len(series)} entries, but received "
            f"{len(eps_schedule)}"
        )
    return float(np.mean([atomic_mass(f, eps) for f, eps in zip(series, eps_schedule)]))


# endregion Atoms

# region Geometric Localization


def geo_indicator(f: Pmf, delta: float, K: int) -> GeoIndicator:
    """
    Whether more than 1 - delta of the mass of f fits in a set of l1-diameter at
    most K

    :param f: Mass function on Z^d
    :type f: Union[LatticePmf, Mapping]
    :param delta: Mass allowed outside the set, 0 < delta < 1
    :type delta: float
    :param K: Diameter bound, non-negative integer
    :type K: int
    :return: Named tuple of the flag (window_mass > 1 - delta), the window mass, and
        whether the window mass is exact
    :rtype: GeoIndicator

    .. note::

       In one dimension the largest mass of any interval of length K is found
       exactly with a sliding window over the sorted support. In higher dimensions
       the mass of l1-balls of radius floor(K/2) centred on support sites is used,
       a lower bound, so the flag may under report but never over reports.
    """
    f = _as_lattice_pmf(f)
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must be strictly between 0 and 1, but received {delta}")
    if isinstance(K, bool) or int(K) != K or K < 0:
        raise ValueError(f"K must be a non-negative integer, but received {K}")
    K = int(K)
    if len(f) == 0:
        return GeoIndicator(flag=False, window_mass=0.0, exact=True)
    if f.d == 1:
        window = _window_mass_1d(f.sites[:, 0], f.probs, K)
        return GeoIndicator(flag=bool(window > 1.0 - delta), window_mass=window, exact=True)
    window = _ball_mass_lower_bound(f.sites, f.probs, K // 2, 1.0 - delta)
    return GeoIndicator(flag=bool(window > 1.0 - delta), window_mass=window, exact=False)


def density_average(series: Sequence[Pmf], delta: float, K: int) -> float:
    """Fraction of the distributions for which the geometric indicator holds"""
    if len(series) == 0:
        raise ValueError("Need at least one distribution")
    return float(np.mean([geo_indicator(f, delta, K).flag for f in series]))


def _window_mass_1d(xs: np.ndarray, probs: np.ndarray, K: int) -> float:
    order = np.argsort(xs, kind="stable")
    xs, probs = xs[order], probs[order]
    cumulative = np.concatenate([[0.0], np.cumsum(probs)])
    right = np.searchsorted(xs, xs + K, side="right")
    return float(np.max(cumulative[right] - cumulative[:-1]))


def _ball_mass_lower_bound(
    sites: np.ndarray, probs: np.ndarray, radius: int, target: float
) -> float:
    order = np.argsort(-probs, kind="stable")
    sites, probs = sites[order], probs[order]
    top_ball = float(probs[np.abs(sites - sites[0]).sum(axis=1) <= radius].sum())
    # No ball holds more than its volume's worth of the largest masses
    volume = _l1_ball_volume(sites.shape[1], radius)
    if volume < probs.shape[0] and probs[:volume].sum() <= target:
        return top_ball
    sites, probs = sites[:MAX_TREE_SITES], probs[:MAX_TREE_SITES]
    tree = KDTree(sites)
    centres = sites[:MAX_CENTRES]
    balls = tree.query_ball_point(centres, r=radius + 0.5, p=1)
    best = max(float(probs[np.asarray(ball, dtype=np.int64)].sum()) for ball in balls)
    return max(best, top_ball)


def _l1_ball_volume(d: int, radius: int) -> int:
    # Lattice points within l1 distance radius of the origin in Z^d
    return int(
        sum(2**k * comb(d, k, exact=True) * comb(radius, k, exact=True) for k in range(d + 1))
    )


# endregion Geometric Localization

# region Sufficient Condition


def localization_sufficient(
    beta: float, law: EnvironmentLaw, walk: StepDistribution
) -> SufficientCondition:
    """
    Entropy criterion for localization, beta lambda'(beta) - lambda(beta) > H(P)

    :param beta: Inverse temperature, 0 < beta < beta_max(law)
    :type beta: float
    :param law: Environment law
    :type law: EnvironmentLaw
    :param walk: Step distribution of the reference walk
    :type walk: StepDistribution
    :return: Named tuple of (holds, lhs, rhs)
    :rtype: SufficientCondition
    :raises DomainError: If beta is outside (0, beta_max)
    """
    beta = check_beta(law, beta)
    lhs = beta * log_mgf_prime(law, beta) - log_mgf(law, beta)
    rhs = entropy(walk)
    return SufficientCondition(holds=bool(lhs > rhs), lhs=float(lhs), rhs=rhs)


# endregion Sufficient Condition

# region Schedules


def constant_schedule(eps: float, n: int) -> np.ndarray:
    """Constant threshold eps_i = eps for n steps"""
    _check_eps(eps)
    return np.full(n, float(eps))


def decaying_schedule(n: int, start: int = 1) -> np.ndarray:
    """
    Vanishing thresholds eps_i = 1/log(e + i) for i = start, ..., start + n - 1

    :param n: Number of steps
    :type n: int
    :param start: Index of the first step, at least 1 so every threshold is below 1
    :type start: int
    :return: Array of thresholds
    :rtype: np.ndarray
    """
    if start < 1:
        raise ValueError(f"start must be at least 1, but received {start}")
    return 1.0 / np.log(math.e + np.arange(start, start + n))


def schedule_from_config(entry: Union[float, str], n: int) -> Tuple[str, np.ndarray]:
    """
    Threshold schedule for steps 1..n from a config entry, a number for a constant
    schedule or "decay" for the vanishing one

    :param entry: Config entry
    :type entry: Union[float, str]
    :param n: Number of steps
    :type n: int
    :return: Tuple of the schedule name and the thresholds
    :rtype: Tuple[str, np.ndarray]
    """
    if isinstance(entry, str):
        if entry.strip().lower() not in ("decay", "decaying"):
            raise ValueError(
                f"eps schedule must be a number or 'decay', but received {entry!r}"
            )
        return "decay", decaying_schedule(n)
    if isinstance(entry, bool) or not isinstance(entry, (int, float)):
        raise ValueError(f"eps schedule must be a number or 'decay', but received {entry!r}")
    return f"eps={float(entry):g}", constant_schedule(float(entry), n)


# endregion Schedules

# region Series


def localization_record(
    i: int,
    f: Pmf,
    eps: float,
    delta: float,
    K: int,
    geo: Optional[GeoIndicator] = None,
) -> Dict[str, Any]:
    """
    Localization statistics of one endpoint distribution

    :param i: Step index
    :type i: int
    :param f: Endpoint distribution at step i
    :type f: Union[LatticePmf, Mapping]
    :param eps: Atom threshold at step i
    :type eps: float
    :param delta: Geometric indicator mass slack
    :type delta: float
    :param K: Geometric indicator diameter
    :type K: int
    :param geo: Precomputed geometric indicator of f, if available
    :type geo: Optional[GeoIndicator]
    :return: Record with the keys of SERIES_COLUMNS
    :rtype: Dict[str, Any]
    """
    f = _as_lattice_pmf(f)
    geo = geo_indicator(f, delta, K) if geo is None else geo
    return {
        "i": int(i),
        "eps_i": float(eps),
        "atomic_mass": atomic_mass(f, eps),
        "max_atom": float(f.probs.max()) if len(f) else 0.0,
        "geo_flag": geo.flag,
        "window_mass": geo.window_mass,
    }


def localization_series(
    series: Sequence[Pmf],
    eps_schedule: Sequence[float],
    delta: float,
    K: int,
    start: int = 1,
) -> pd.DataFrame:
    """
    Localization statistics of a sequence of endpoint distributions

    :param series: Endpoint distributions, the first at step `start`
    :type series: Sequence[Union[LatticePmf, Mapping]]
    :param eps_schedule: Atom thresholds, one per distribution
    :type eps_schedule: Sequence[float]
    :param delta: Geometric indicator mass slack
    :type delta: float
    :param K: Geometric indicator diameter
    :type K: int
    :param start: Step index of the first distribution
    :type start: int
    :return: DataFrame with columns i, eps_i, atomic_mass, max_atom, geo_flag,
        window_mass
    :rtype: pd.DataFrame
    """
    if len(eps_schedule) < len(series):
        raise ValueError(
            f"eps_schedule must have at least {len(series)} entries, but received "
            f"{len(eps_schedule)}"
        )
    records = [
        localization_record(start + j, f, eps, delta, K)
        for j, (f, eps) in enumerate(zip(series, eps_schedule))
    ]
    return pd.DataFrame(records, columns=SERIES_COLUMNS)


def localization_summary(
    series: pd.DataFrame,
    beta: float,
    schedule: str,
    delta: float,
    K: int,
    exact: bool = True,
) -> Dict[str, Any]:
    """
    Summary of a localization series, {beta, n, apa_avg, geo_density, eps_schedule,
    delta, K, geo_exact}
    """
    return {
        "beta": float(beta),
        "n": int(series["i"].max()) if len(series) else 0,
        "apa_avg": float(series["atomic_mass"].mean()),
        "geo_density": float(series["geo_flag"].mean()),
        "eps_schedule": schedule,
        "delta": float(delta),
        "K": int(K),
        "geo_exact": bool(exact),
    }


class LocalizationObserver:
    """
    Replica observer recording the localization statistics of every polymer state
    under several threshold schedules

    :param schedules: Threshold arrays by schedule name, entry i - 1 is used at
        step i
    :type schedules: Mapping[str, np.ndarray]
    :param delta: Geometric indicator mass slack
    :type delta: float
    :param K: Geometric indicator diameter
    :type K: int
    """

    def __init__(self, schedules: Mapping[str, np.ndarray], delta: float, K: int):
        self.schedules = {name: np.asarray(eps, dtype=float) for name, eps in schedules.items()}
        self.delta = delta
        self.K = K

    def __call__(self, state: PolymerState) -> List[Dict[str, Any]]:
        pmf = endpoint_distribution(state)
        geo = geo_indicator(pmf, self.delta, self.K)
        return [
            {
                "schedule": name,
                **localization_record(
                    state.n, pmf, eps[state.n - 1], self.delta, self.K, geo=geo
                ),
            }
            for name, eps in self.schedules.items()
        ]


# endregion Series

# region Helper Functions


def _check_eps(eps: float):
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"eps must be in [0, 1), but received {eps}")


# endregion Helper Functions
