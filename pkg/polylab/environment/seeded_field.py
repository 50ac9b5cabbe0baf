"""
Deterministic seeded space-time disorder field.

The value at time-space site (i, x) is produced by hashing (seed, stream, i, x)
with a 64 bit mixing function into a uniform in (0, 1), which is mapped through the
inverse distribution function of the environment law. Every value is therefore a
pure function of its arguments, can be accessed in O(1) without storing the
environment, and time-space shifts are just offsets on the counter.
"""

# Standard Library Imports
from __future__ import annotations
from dataclasses import dataclass, field, replace
from typing import Sequence, Tuple, Union

# External Imports
import numpy as np
from numpy.typing import ArrayLike

# Local Imports
from polylab.environment.environment_laws import EnvironmentLaw

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_MIX_B = np.uint64(0x94D049BB133111EB)
_TWO_POW_M53 = 2.0**-53

Site = Union[int, Sequence[int]]


# region Seeded Field
@dataclass(frozen=True)
class SeededField:
    """
    Seeded realization of the i.i.d. environment eta(i, x)

    :param seed: 64 bit seed, 0 <= seed < 2**64
    :type seed: int
    :param law: Law of the environment variables
    :type law: EnvironmentLaw
    :param time_offset: Time shift k applied to every evaluation
    :type time_offset: int
    :param space_offset: Space shift y applied to every evaluation, empty for no
        shift (the dimension is then taken from the evaluated sites)
    :type space_offset: Tuple[int, ...]
    :param stream: Index of an independent stream sharing the same seed
    :type stream: int
    """

    seed: int
    law: EnvironmentLaw
    time_offset: int = 0
    space_offset: Tuple[int, ...] = field(default_factory=tuple)
    stream: int = 0

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(
                f"seed must be a 64 bit non-negative integer, but received {self.seed}"
            )
        if self.time_offset < 0:
            raise ValueError(
                f"time_offset must be non-negative, but received {self.time_offset}"
            )
        if self.stream < 0:
            raise ValueError(f"stream must be non-negative, but received {self.stream}")
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(
            self, "space_offset", tuple(int(c) for c in self.space_offset)
        )

    def evaluate(self, i: int, x: Site) -> float:
        """
        Value of the environment at time i and site x, eta(i + k, x + y)

        :param i: Time index, at least 1
        :type i: int
        :param x: Lattice site, an int in one dimension or a sequence of ints
        :type x: Site
        :return: Environment value
        :rtype: float
        """
        site = np.atleast_1d(np.asarray(x, dtype=np.int64)).reshape(1, -1)
        return float(self.evaluate_sites(i, site)[0])

    def evaluate_sites(self, i: int, sites: ArrayLike) -> np.ndarray:
        """
        Values of the environment at time i for an array of sites

        :param i: Time index, at least 1
        :type i: int
        :param sites: Integer array of shape (m, d)
        :type sites: ArrayLike
        :return: Array of shape (m,)
        :rtype: np.ndarray
        """
        return self.evaluate_grid(np.array([i]), sites)[0]

    def evaluate_grid(self, times: ArrayLike, sites: ArrayLike) -> np.ndarray:
        """
        Values of the environment for every pair of a time and a site

        :param times: Time indices, each at least 1, shape (T,)
        :type times: ArrayLike
        :param sites: Integer array of shape (m, d)
        :type sites: ArrayLike
        :return: Array of shape (T, m)
        :rtype: np.ndarray
        """
        times = np.asarray(times, dtype=np.int64).reshape(-1)
        sites = np.asarray(sites, dtype=np.int64)
        if sites.ndim == 1:
            sites = sites.reshape(-1, 1)
        if times.size and times.min() < 1:
            raise ValueError(
                f"Time indices must be at least 1, but received {times.min()}"
            )
        if self.space_offset:
            if len(self.space_offset) != sites.shape[1]:
                raise ValueError(
                    f"Sites have dimension {sites.shape[1]} but the field has a "
                    f"space offset of dimension {len(self.space_offset)}"
                )
            sites = sites + np.array(self.space_offset, dtype=np.int64)
        times = times + self.time_offset
        u = self._uniforms(times, sites)
        return self.law.ppf(u)

    def shift_view(self, k: int, y: Site = ()) -> SeededField:
        """
        Time-space shifted view of the field, (theta_{k,y} eta)(i,x) = eta(i+k, x+y)

        :param k: Time shift, non-negative
        :type k: int
        :param y: Space shift, an int in one dimension or a sequence of ints (empty
            or all zero for no shift, which leaves the field usable in any dimension)
        :type y: Site
        :return: Field sharing this seed with composed offsets
        :rtype: SeededField
        """
        if k < 0:
            raise ValueError(f"Time shift must be non-negative, but received {k}")
        y = tuple(int(c) for c in np.atleast_1d(np.asarray(y, dtype=np.int64)))
        # A zero shift carries no dimension
        if not any(y):
            y = ()
        offset = self.space_offset
        if y and offset:
            if len(y) != len(offset):
                raise ValueError(
                    f"Space shift has dimension {len(y)}, but the field offset has "
                    f"dimension {len(offset)}"
                )
            offset = tuple(a + b for a, b in zip(offset, y))
            if not any(offset):
                offset = ()
        elif y:
            offset = y
        return replace(self, time_offset=self.time_offset + int(k), space_offset=offset)

    def with_stream(self, stream: int) -> SeededField:
        """Independent field sharing the seed, law, and offsets"""
        return replace(self, stream=int(stream))

    def _uniforms(self, times: np.ndarray, sites: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore"):
            base = _mix64(
                np.array([self.seed], dtype=np.uint64)
                + _GOLDEN * np.uint64(self.stream + 1)
            )
            h = _mix64((base + _GOLDEN) ^ times.view(np.uint64))[:, None]
            h = np.broadcast_to(h, (times.shape[0], sites.shape[0]))
            for j in range(sites.shape[1]):
                coord = np.ascontiguousarray(sites[:, j]).view(np.uint64)
                h = _mix64((h + _GOLDEN) ^ coord[None, :])
        return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_POW_M53


def _mix64(z: np.ndarray) -> np.ndarray:
    # splitmix64 finalizer
    z = (z ^ (z >> np.uint64(30))) * _MIX_A
    z = (z ^ (z >> np.uint64(27))) * _MIX_B
    return z ^ (z >> np.uint64(31))


# endregion Seeded Field
