"""
Step distributions of the reference walk, the finitely supported probability mass
function q(z) = P(omega_1 = z) of a homogeneous random walk on Z^d started at the
origin.
"""

# Standard Library Imports
from __future__ import annotations
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

# External Imports
import numpy as np
import scipy.stats
from numpy.typing import NDArray
from scipy.special import zeta

# Local Imports
from polylab.utils._arguments import _parse_walk_kind
from polylab.utils.lattice import LatticePmf, _as_site, _convolve_sparse
from polylab.utils.polylab_exceptions import ConfigValidationError

MAX_DIMENSION = 3
_NORMALIZATION_TOL = 1e-12
_CUSTOM_NORMALIZATION_TOL = 1e-9


# region Step Distribution
@dataclass(frozen=True, eq=False)
class StepDistribution:
    """
    Finitely supported step distribution of a reference walk

    :param d: Spatial dimension, between 1 and 3
    :type d: int
    :param steps: Step offsets, integer array of shape (k, d), sorted
        lexicographically
    :type steps: NDArray[np.int64]
    :param probs: Step probabilities, shape (k,), each strictly between 0 and 1 and
        summing to 1
    :type probs: NDArray[np.float64]
    :param kind: Name of the builder that produced the distribution
    :type kind: str
    :param cutoff: Largest step magnitude kept by a truncating builder
    :type cutoff: Optional[int]
    :param tail_mass: Probability mass discarded by truncation before
        renormalizing
    :type tail_mass: float
    :param exponent: Tail exponent of a power law builder
    :type exponent: Optional[float]
    """

    d: int
    steps: NDArray[np.int64]
    probs: NDArray[np.float64]
    kind: str = "custom"
    cutoff: Optional[int] = None
    tail_mass: float = 0.0
    exponent: Optional[float] = None

    def __post_init__(self):
        if not 1 <= self.d <= MAX_DIMENSION:
            raise ValueError(
                f"Dimension must be between 1 and {MAX_DIMENSION}, but received "
                f"{self.d}"
            )
        steps = np.asarray(self.steps, dtype=np.int64).reshape(-1, self.d)
        probs = np.asarray(self.probs, dtype=float).reshape(-1)
        if steps.shape[0] != probs.shape[0] or steps.shape[0] == 0:
            raise ValueError(
                f"Need a non-empty set of steps with one probability each, but "
                f"received {steps.shape[0]} steps and {probs.shape[0]} probabilities"
            )
        if np.any(probs <= 0.0) or np.any(probs >= 1.0):
            raise ValueError(
                f"Every step probability must be strictly between 0 and 1, but "
                f"received {probs.tolist()}"
            )
        if abs(probs.sum() - 1.0) > _NORMALIZATION_TOL:
            raise ValueError(
                f"Step probabilities must sum to 1, but sum to {probs.sum()!r}"
            )
        order = np.lexsort(steps.T[::-1])
        steps, probs = steps[order], probs[order]
        if steps.shape[0] > 1 and np.any(np.all(steps[1:] == steps[:-1], axis=1)):
            raise ValueError("Step offsets must be distinct")
        steps.setflags(write=False)
        probs.setflags(write=False)
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "probs", probs)

    def as_dict(self) -> Dict[Tuple[int, ...], float]:
        return {tuple(int(c) for c in z): float(q) for z, q in zip(self.steps, self.probs)}

    def to_config(self) -> Dict[str, Any]:
        """Return a config mapping that rebuilds this distribution"""
        if self.kind == "srw":
            return {"kind": "srw", "d": self.d}
        if self.kind == "power_law":
            return {
                "kind": "power_law",
                "exponent": self.exponent,
                "cutoff": self.cutoff,
            }
        return {
            "kind": "custom",
            "d": self.d,
            "steps": [
                [int(z[0]) if self.d == 1 else [int(c) for c in z], float(q)]
                for z, q in zip(self.steps, self.probs)
            ],
        }

    def __len__(self) -> int:
        return self.probs.shape[0]


# endregion Step Distribution

# region Builders


def srw(d: int = 1) -> StepDistribution:
    """
    Simple random walk, mass 1/(2d) on each of the 2d unit vectors

    :param d: Dimension, between 1 and 3
    :type d: int
    :return: Step distribution of the simple random walk
    :rtype: StepDistribution
    """
    if not isinstance(d, (int, np.integer)) or not 1 <= d <= MAX_DIMENSION:
        raise ValueError(f"d must be 1, 2, or 3, but received {d}")
    eye = np.eye(d, dtype=np.int64)
    steps = np.concatenate([eye, -eye])
    probs = np.full(2 * d, 1.0 / (2 * d))
    return StepDistribution(d=d, steps=steps, probs=probs, kind="srw")


def power_law_1d(exponent: float, cutoff: int) -> StepDistribution:
    """
    Symmetric one dimensional walk with q(z) proportional to |z|^(-exponent) for
    1 <= |z| <= cutoff

    :param exponent: Tail exponent, greater than 1
    :type exponent: float
    :param cutoff: Largest step magnitude M, at least 1
    :type cutoff: int
    :return: Truncated power law step distribution, with the discarded tail mass
        recorded in `tail_mass`
    :rtype: StepDistribution

    .. note::

       The tail mass is the fraction of the untruncated law lost by the cutoff,
       zeta(exponent, M+1)/zeta(exponent, 1), using the Hurwitz zeta function.
    """
    if isinstance(exponent, bool) or not exponent > 1.0:
        raise ValueError(f"exponent must be greater than 1, but received {exponent}")
    if isinstance(cutoff, bool) or int(cutoff) != cutoff or cutoff < 1:
        raise ValueError(f"cutoff must be an integer >= 1, but received {cutoff}")
    cutoff = int(cutoff)
    magnitudes = np.arange(1, cutoff + 1, dtype=np.int64)
    weights = magnitudes.astype(float) ** (-float(exponent))
    half = weights / (2.0 * weights.sum())
    steps = np.concatenate([-magnitudes[::-1], magnitudes]).reshape(-1, 1)
    probs = np.concatenate([half[::-1], half])
    tail = float(zeta(exponent, cutoff + 1) / zeta(exponent, 1))
    return StepDistribution(
        d=1,
        steps=steps,
        probs=probs,
        kind="power_law",
        cutoff=cutoff,
        tail_mass=tail,
        exponent=float(exponent),
    )


def custom_walk(
    steps: Sequence[Tuple[Union[int, Sequence[int]], float]], d: int = 1
) -> StepDistribution:
    """
    Step distribution from an explicit list of (offset, probability) pairs

    :param steps: Offsets (ints when d=1, sequences of ints otherwise) with their
        probabilities
    :type steps: Sequence[Tuple[Union[int, Sequence[int]], float]]
    :param d: Dimension
    :type d: int
    :return: Step distribution
    :rtype: StepDistribution
    :raises ValueError: If the probabilities don't sum to 1 within 1e-9, any
        probability is not in (0, 1), or an offset appears twice
    """
    offsets = []
    probs = []
    for entry in steps:
        if len(entry) != 2:
            raise ValueError(
                f"Each step must be an (offset, probability) pair, but received "
                f"{entry!r}"
            )
        offset, prob = _as_site(entry[0]), float(entry[1])
        if len(offset) != d:
            raise ValueError(
                f"Offset {offset} does not have the walk dimension {d}"
            )
        offsets.append(offset)
        probs.append(prob)
    probs = np.array(probs, dtype=float)
    if probs.size == 0:
        raise ValueError("A custom walk needs at least one step")
    if abs(probs.sum() - 1.0) > _CUSTOM_NORMALIZATION_TOL:
        raise ValueError(
            f"Step probabilities must sum to 1 within {_CUSTOM_NORMALIZATION_TOL}, but "
            f"sum to {probs.sum()!r}"
        )
    if np.any(probs <= 0.0) or np.any(probs >= 1.0):
        raise ValueError(
            f"Every step probability must be strictly between 0 and 1, but received "
            f"{probs.tolist()}"
        )
    return StepDistribution(
        d=d,
        steps=np.array(offsets, dtype=np.int64).reshape(-1, d),
        probs=probs / probs.sum(),
        kind="custom",
    )


def walk_from_config(config: Mapping[str, Any]) -> StepDistribution:
    """
    Create a step distribution from a configuration mapping, one of
    ``{"kind": "srw", "d": 1}``,
    ``{"kind": "power_law", "exponent": 2.0, "cutoff": 10}``, or
    ``{"kind": "custom", "d": 1, "steps": [[-1, 0.5], [1, 0.5]]}``

    :param config: Walk configuration
    :type config: Mapping[str, Any]
    :return: Step distribution
    :rtype: StepDistribution
    :raises ConfigValidationError: On any invalid key or value
    """
    if not isinstance(config, Mapping):
        raise ConfigValidationError(
            "walk", f"must be a mapping, but received {type(config).__name__}"
        )
    if "kind" not in config:
        raise ConfigValidationError("walk.kind", "missing required key")
    try:
        kind = _parse_walk_kind(config["kind"])
    except ValueError as err:
        raise ConfigValidationError("walk.kind", str(err)) from err
    allowed = {
        "srw": {"kind", "d"},
        "power_law": {"kind", "exponent", "cutoff"},
        "custom": {"kind", "d", "steps"},
    }[kind]
    for key in config:
        if key not in allowed:
            raise ConfigValidationError(
                f"walk.{key}", f"unknown key for a {kind} walk, expected {sorted(allowed)}"
            )
    try:
        if kind == "srw":
            return srw(int(config.get("d", 1)))
        if kind == "power_law":
            for key in ("exponent", "cutoff"):
                if key not in config:
                    raise ConfigValidationError(f"walk.{key}", "missing required key")
            return power_law_1d(float(config["exponent"]), config["cutoff"])
        if "steps" not in config:
            raise ConfigValidationError("walk.steps", "missing required key")
        return custom_walk(config["steps"], d=int(config.get("d", 1)))
    except ConfigValidationError:
        raise
    except (TypeError, ValueError) as err:
        raise ConfigValidationError("walk", str(err)) from err


# endregion Builders

# region Walk Functions


def entropy(walk: StepDistribution) -> float:
    """
    Shannon entropy of the step distribution, -sum q(z) log q(z) (natural log)

    :param walk: Step distribution
    :type walk: StepDistribution
    :return: Entropy in nats
    :rtype: float
    """
    return float(scipy.stats.entropy(walk.probs))


def max_step_prob(walk: StepDistribution) -> float:
    """Largest single step probability, max_z q(z)"""
    return float(walk.probs.max())


def n_step_marginal(walk: StepDistribution, n: int) -> LatticePmf:
    """
    Exact distribution of the walk position after n steps, by repeated sparse
    convolution

    :param walk: Step distribution
    :type walk: StepDistribution
    :param n: Number of steps, non-negative
    :type n: int
    :return: Law of omega_n
    :rtype: LatticePmf
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, but received {n}")
    sites = np.zeros((1, walk.d), dtype=np.int64)
    probs = np.ones(1)
    for _ in range(n):
        sites, probs = _convolve_sparse(sites, probs, walk.steps, walk.probs)
    return LatticePmf(sites=sites, probs=probs)


# endregion Walk Functions
