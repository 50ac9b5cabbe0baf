"""
Sparse probability mass functions on the integer lattice Z^d, and the sparse
convolution used to push them through one step of a reference walk
"""

# Standard Library Imports
from __future__ import annotations
from dataclasses import dataclass
from typing import Dict, Mapping, Tuple, Union

# External Imports
import numpy as np
from numpy.typing import NDArray

Site = Tuple[int, ...]


# region Lattice pmf
@dataclass(frozen=True, eq=False)
class LatticePmf:
    """
    Sparse (sub)probability mass function on Z^d

    :param sites: Integer array of shape (m, d), rows sorted lexicographically
    :type sites: NDArray[np.int64]
    :param probs: Masses of the sites, shape (m,)
    :type probs: NDArray[np.float64]
    """

    sites: NDArray[np.int64]
    probs: NDArray[np.float64]

    def __post_init__(self):
        sites = np.asarray(self.sites, dtype=np.int64)
        probs = np.asarray(self.probs, dtype=float)
        if sites.ndim != 2 or probs.ndim != 1 or sites.shape[0] != probs.shape[0]:
            raise ValueError(
                f"sites must have shape (m, d) and probs shape (m,), but received "
                f"{sites.shape} and {probs.shape}"
            )
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_mapping(cls, pmf: Mapping[Union[int, Site], float], d: int = None):
        """
        Create a LatticePmf from a mapping of sites to masses

        :param pmf: Mapping from sites (tuples, or ints when d=1) to masses, zero
            masses are dropped
        :type pmf: Mapping[Union[int, Site], float]
        :param d: Dimension, only needed when pmf is empty (defaults to 1)
        :type d: int
        :return: The sparse pmf
        :rtype: LatticePmf
        """
        items = [(_as_site(k), float(v)) for k, v in pmf.items() if v != 0.0]
        if not items:
            return cls.empty(d or 1)
        dims = {len(k) for k, _ in items}
        if len(dims) != 1:
            raise ValueError(f"All sites must have the same dimension, found {dims}")
        items.sort(key=lambda kv: kv[0])
        sites = np.array([k for k, _ in items], dtype=np.int64)
        probs = np.array([v for _, v in items], dtype=float)
        return cls(sites=sites, probs=probs)

    @classmethod
    def empty(cls, d: int = 1) -> LatticePmf:
        return cls(sites=np.zeros((0, d), dtype=np.int64), probs=np.zeros(0))

    @property
    def d(self) -> int:
        return self.sites.shape[1]

    def total(self) -> float:
        return float(self.probs.sum())

    def as_dict(self) -> Dict[Site, float]:
        return {
            tuple(int(c) for c in s): float(p) for s, p in zip(self.sites, self.probs)
        }

    def __len__(self) -> int:
        return self.probs.shape[0]


def _as_site(key: Union[int, Site]) -> Site:
    if isinstance(key, (int, np.integer)):
        return (int(key),)
    return tuple(int(c) for c in key)


def _as_lattice_pmf(pmf: Union[LatticePmf, Mapping]) -> LatticePmf:
    if isinstance(pmf, LatticePmf):
        return pmf
    if isinstance(pmf, Mapping):
        return LatticePmf.from_mapping(pmf)
    raise ValueError(
        f"pmf must be a LatticePmf or a mapping of sites to masses, but received "
        f"{type(pmf)}"
    )


# endregion Lattice pmf

# region Convolution
# Largest dense scratch box (in sites) used before switching to sort based
# aggregation
_DENSE_BOX_LIMIT = 50_000_000


def _convolve_sparse(
    sites: NDArray[np.int64],
    weights: NDArray[np.float64],
    steps: NDArray[np.int64],
    step_probs: NDArray[np.float64],
) -> Tuple[NDArray[np.int64], NDArray[np.float64]]:
    """
    Push nonnegative weights on sites through one step of a walk,
    out(x) = sum_y weights(y) P(y, x)

    :param sites: Unique sites, shape (m, d)
    :type sites: NDArray[np.int64]
    :param weights: Nonnegative weights of the sites, shape (m,)
    :type weights: NDArray[np.float64]
    :param steps: Step offsets of the walk, shape (k, d)
    :type steps: NDArray[np.int64]
    :param step_probs: Step probabilities, shape (k,)
    :type step_probs: NDArray[np.float64]
    :return: Tuple of (sites, weights) of the result, sites sorted
        lexicographically and zero weights removed
    :rtype: Tuple[NDArray[np.int64], NDArray[np.float64]]
    """
    d = sites.shape[1]
    if sites.shape[0] == 0:
        return np.zeros((0, d), dtype=np.int64), np.zeros(0)
    lo = sites.min(axis=0) + steps.min(axis=0)
    hi = sites.max(axis=0) + steps.max(axis=0)
    shape = tuple(int(s) for s in (hi - lo + 1))
    box_size = int(np.prod(shape, dtype=np.float64))
    candidates = sites.shape[0] * steps.shape[0]
    if box_size <= max(8 * candidates, 4096) and box_size <= _DENSE_BOX_LIMIT:
        dense = np.zeros(shape, dtype=float)
        for z, q in zip(steps, step_probs):
            # sites are unique, so a fancy-index add has no repeated targets
            dense[tuple((sites + z - lo).T)] += q * weights
        nonzero = np.nonzero(dense)
        new_sites = np.stack(nonzero, axis=1).astype(np.int64) + lo
        return new_sites, dense[nonzero]
    moved = (sites[:, None, :] + steps[None, :, :]).reshape(-1, d)
    contrib = (weights[:, None] * step_probs[None, :]).reshape(-1)
    new_sites, inverse = np.unique(moved, axis=0, return_inverse=True)
    new_weights = np.bincount(inverse.reshape(-1), weights=contrib)
    keep = new_weights > 0.0
    return new_sites[keep], new_weights[keep]


# endregion Convolution
