"""
Partial isometries of N x Z^d. Differences between points on different levels are
infinite, and the degree of a map is the largest m such that every pair of points
closer than m (before or after mapping) keeps its difference.
"""

# Standard Library Imports
from __future__ import annotations
import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Sequence, Tuple

# External Imports
import numpy as np

# Local Imports
from polylab.pspm.pspm import Point

INFINITE_DEGREE = math.inf


def _as_point(p: Sequence) -> Point:
    level, x = p
    x = (int(x),) if isinstance(x, (int, np.integer)) else tuple(int(c) for c in x)
    return int(level), x


# region Isometry
@dataclass(frozen=True)
class Isometry:
    """
    Finite injective partial map on N x Z^d

    :param pairs: (source, target) pairs of (level, site) points, with distinct
        sources and distinct targets
    :type pairs: Tuple[Tuple[Point, Point], ...]
    """

    pairs: Tuple[Tuple[Point, Point], ...] = ()

    def __post_init__(self):
        pairs = tuple((_as_point(u), _as_point(v)) for u, v in self.pairs)
        sources = [u for u, _ in pairs]
        targets = [v for _, v in pairs]
        if len(set(sources)) != len(sources):
            raise ValueError("Isometry sources must be distinct")
        if len(set(targets)) != len(targets):
            raise ValueError("Isometry is not injective, targets must be distinct")
        object.__setattr__(self, "pairs", pairs)

    @property
    def sources(self) -> List[Point]:
        return [u for u, _ in self.pairs]

    @property
    def targets(self) -> List[Point]:
        return [v for _, v in self.pairs]

    def as_dict(self) -> Dict[Point, Point]:
        return dict(self.pairs)

    def inverse(self) -> Isometry:
        return Isometry(tuple((v, u) for u, v in self.pairs))

    def degree(self) -> float:
        """Maximum degree of the map, see :func:`degree`"""
        return degree(self)

    def __len__(self) -> int:
        return len(self.pairs)


def identity_isometry(points: Iterable[Sequence]) -> Isometry:
    return Isometry(tuple((p, p) for p in points))


# endregion Isometry

# region Degree


def degree(phi: Isometry) -> float:
    """
    Maximum degree of an isometry

    :param phi: Isometry
    :type phi: Isometry
    :return: math.inf if every pair difference is preserved, otherwise the minimum
        over violating pairs (u, v) of min(||u - v||_1, ||phi(u) - phi(v)||_1),
        at least 1 for an injective map
    :rtype: float
    """
    if len(phi) < 2:
        return INFINITE_DEGREE
    src = np.array([[u[0], *u[1]] for u in phi.sources], dtype=np.int64)
    tgt = np.array([[v[0], *v[1]] for v in phi.targets], dtype=np.int64)
    return _degree_arrays(src[:, 0], src[:, 1:], tgt[:, 0], tgt[:, 1:])


def _degree_arrays(
    src_levels: np.ndarray,
    src_sites: np.ndarray,
    tgt_levels: np.ndarray,
    tgt_sites: np.ndarray,
) -> float:
    # Pairwise violation values, inf for pairs whose differences agree
    if src_levels.shape[0] < 2:
        return INFINITE_DEGREE
    src_norm, src_diff, src_same = _pair_differences(src_levels, src_sites)
    tgt_norm, tgt_diff, tgt_same = _pair_differences(tgt_levels, tgt_sites)
    agree = (src_same & tgt_same & np.all(src_diff == tgt_diff, axis=-1)) | (
        ~src_same & ~tgt_same
    )
    violation = np.where(agree, np.inf, np.minimum(src_norm, tgt_norm))
    value = float(violation.min())
    if value == 0.0:
        raise ValueError("Isometry is not injective")
    return value if math.isfinite(value) else INFINITE_DEGREE


def _pair_differences(levels: np.ndarray, sites: np.ndarray):
    diff = sites[:, None, :] - sites[None, :, :]
    same = levels[:, None] == levels[None, :]
    norm = np.where(same, np.abs(diff).sum(axis=-1).astype(float), np.inf)
    return norm, diff, same


# endregion Degree

# region Composition and Extension


def compose(phi: Isometry, psi: Isometry) -> Isometry:
    """
    Composition theta = psi o phi, defined on the sources of phi whose image is a
    source of psi. Its degree is at least min(deg(phi), deg(psi)).

    :param phi: First map
    :type phi: Isometry
    :param psi: Second map
    :type psi: Isometry
    :return: The composed isometry
    :rtype: Isometry
    """
    psi_map = psi.as_dict()
    return Isometry(tuple((u, psi_map[v]) for u, v in phi.pairs if v in psi_map))


def extend_isometry(phi: Isometry, k: int) -> Isometry:
    """
    Extend phi to every point within l1 distance k of its sources. A new point v is
    sent to phi(u) + (v - u) with u its nearest source on the same level (ties broken
    lexicographically). If deg(phi) >= 2k + m the extension has degree at least m.

    :param phi: Isometry to extend
    :type phi: Isometry
    :param k: Radius of the neighbourhood, non-negative
    :type k: int
    :return: Extended isometry, agreeing with phi on its sources
    :rtype: Isometry
    """
    if k < 0:
        raise ValueError(f"k must be non-negative, but received {k}")
    if not phi.pairs:
        return phi
    d = len(phi.sources[0][1])
    ball = [
        z
        for z in itertools.product(range(-k, k + 1), repeat=d)
        if sum(abs(c) for c in z) <= k
    ]
    mapping = phi.as_dict()
    anchors: Dict[Point, Tuple[int, Point]] = {}
    for u in sorted(mapping):
        level, x = u
        for z in ball:
            v = (level, tuple(a + b for a, b in zip(x, z)))
            if v in mapping:
                continue
            dist = sum(abs(c) for c in z)
            if v not in anchors or dist < anchors[v][0]:
                anchors[v] = (dist, u)
    extension = dict(mapping)
    for v, (_, u) in anchors.items():
        t_level, t_x = mapping[u]
        extension[v] = (
            t_level,
            tuple(a + b - c for a, b, c in zip(t_x, v[1], u[1])),
        )
    return Isometry(tuple(sorted(extension.items())))


# endregion Composition and Extension
