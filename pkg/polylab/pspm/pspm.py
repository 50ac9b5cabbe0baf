"""
Partitioned subprobability measures: sparse subprobability mass functions
f on N x Z^d with total mass at most one, considered up to per level translations
and relabeling of the levels.
"""

# Standard Library Imports
from __future__ import annotations
import json
from dataclasses import dataclass
from typing import (
    Any,
    Dict,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

# External Imports
import numpy as np
from numpy.typing import NDArray
from scipy.optimize import linear_sum_assignment

# Local Imports
from polylab.utils.lattice import LatticePmf, _as_lattice_pmf, _as_site
from polylab.utils.polylab_exceptions import MassError

MASS_TOL = 1e-12

Point = Tuple[int, Tuple[int, ...]]
Atom = Tuple[int, Tuple[int, ...], float]


# region Pspm
@dataclass(frozen=True, eq=False)
class Pspm:
    """
    Sparse partitioned subprobability measure

    :param levels: Level (element of N, starting at 1) of each atom, shape (m,)
    :type levels: NDArray[np.int64]
    :param sites: Lattice site of each atom, shape (m, d)
    :type sites: NDArray[np.int64]
    :param masses: Mass of each atom, shape (m,), zero masses are dropped
    :type masses: NDArray[np.float64]

    .. note::

       Atoms are stored sorted lexicographically on (level, site), and the norm
       ||f|| (total mass) is computed once at construction.
    """

    levels: NDArray[np.int64]
    sites: NDArray[np.int64]
    masses: NDArray[np.float64]

    def __post_init__(self):
        levels = np.asarray(self.levels, dtype=np.int64).reshape(-1)
        masses = np.asarray(self.masses, dtype=float).reshape(-1)
        sites = np.asarray(self.sites, dtype=np.int64)
        if sites.ndim != 2 or sites.shape[0] != levels.shape[0]:
            raise ValueError(
                f"sites must have shape (m, d) with m={levels.shape[0]}, but received "
                f"{sites.shape}"
            )
        if masses.shape[0] != levels.shape[0]:
            raise ValueError(
                f"Need one mass per atom, but received {masses.shape[0]} masses for "
                f"{levels.shape[0]} atoms"
            )
        if np.any(masses < 0.0) or not np.all(np.isfinite(masses)):
            raise MassError(f"Masses must be finite and non-negative, but received {masses}")
        if np.any(levels < 1):
            raise ValueError(f"Levels must be at least 1, but received {levels}")
        nonzero = masses > 0.0
        levels, sites, masses = levels[nonzero], sites[nonzero], masses[nonzero]
        order = np.lexsort(np.column_stack([levels, sites]).T[::-1])
        levels, sites, masses = levels[order], sites[order], masses[order]
        if levels.shape[0] > 1:
            same = (levels[1:] == levels[:-1]) & np.all(sites[1:] == sites[:-1], axis=1)
            if np.any(same):
                raise ValueError("Atoms must be at distinct (level, site) points")
        norm = float(masses.sum())
        if norm > 1.0 + MASS_TOL:
            raise MassError(f"Total mass must be at most 1, but received {norm!r}")
        for arr in (levels, sites, masses):
            arr.setflags(write=False)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "_norm", norm)

    # region Constructors
    @classmethod
    def zero(cls, d: int = 1) -> Pspm:
        """The zero measure"""
        return cls(
            levels=np.zeros(0, dtype=np.int64),
            sites=np.zeros((0, d), dtype=np.int64),
            masses=np.zeros(0),
        )

    @classmethod
    def from_atoms(cls, atoms: Iterable[Sequence[Any]], d: Optional[int] = None) -> Pspm:
        """
        Create a Pspm from (level, site, mass) triples

        :param atoms: Triples of level, site (int or sequence of ints), and mass
        :type atoms: Iterable[Sequence[Any]]
        :param d: Dimension, needed only when atoms is empty (defaults to 1)
        :type d: Optional[int]
        :return: The Pspm
        :rtype: Pspm
        """
        atoms = [(int(a[0]), _as_site(a[1]), float(a[2])) for a in atoms]
        if not atoms:
            return cls.zero(d or 1)
        dims = {len(a[1]) for a in atoms}
        if len(dims) != 1 or (d is not None and dims != {d}):
            raise ValueError(f"All atoms must have the same dimension, found {dims}")
        return cls(
            levels=np.array([a[0] for a in atoms], dtype=np.int64),
            sites=np.array([a[1] for a in atoms], dtype=np.int64),
            masses=np.array([a[2] for a in atoms], dtype=float),
        )

    @classmethod
    def from_json(cls, data: Union[str, Mapping[str, Any]]) -> Pspm:
        """
        Read a Pspm from its JSON form ``{"atoms": [[level, [x...], mass], ...]}``,
        given either as a string or as the parsed mapping
        """
        if isinstance(data, str):
            data = json.loads(data)
        if "atoms" not in data:
            raise ValueError("Pspm JSON must have an 'atoms' key")
        return cls.from_atoms(data["atoms"], d=data.get("d"))

    # endregion Constructors

    @property
    def d(self) -> int:
        return self.sites.shape[1]

    @property
    def norm(self) -> float:
        """Total mass ||f||"""
        return self._norm

    def level_set(self) -> List[int]:
        """The N-support H_f, the levels carrying positive mass"""
        return [int(lv) for lv in np.unique(self.levels)]

    def level_mass(self, level: int) -> float:
        return float(self.masses[self.levels == level].sum())

    def atoms(self) -> List[Atom]:
        return [
            (int(lv), tuple(int(c) for c in x), float(m))
            for lv, x, m in zip(self.levels, self.sites, self.masses)
        ]

    def as_dict(self) -> Dict[Point, float]:
        return {(lv, x): m for lv, x, m in self.atoms()}

    def top_atoms(self, k: int) -> List[Atom]:
        """
        The k largest atoms, by descending mass with ties broken lexicographically
        on (level, site)
        """
        order = _descending_order(self)
        return [self.atoms()[i] for i in order[:k]]

    def to_json(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "atoms": [[lv, list(x), m] for lv, x, m in self.atoms()],
        }

    def __len__(self) -> int:
        return self.masses.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pspm):
            return NotImplemented
        return (
            self.d == other.d
            and np.array_equal(self.levels, other.levels)
            and np.array_equal(self.sites, other.sites)
            and np.array_equal(self.masses, other.masses)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"Pspm(norm={self.norm:.6g}, atoms={self.atoms()})"


def _descending_order(f: Pspm) -> np.ndarray:
    # Descending mass, then lexicographic on (level, site)
    keys = [f.sites[:, j] for j in range(f.d - 1, -1, -1)] + [f.levels, -f.masses]
    return np.lexsort(keys)


# endregion Pspm

# region Pspm Functions


def embed(pmf: Union[LatticePmf, Mapping]) -> Pspm:
    """
    Embed a (sub)probability mass function on Z^d into the space, placing all of its
    mass on level 1

    :param pmf: Mass function as a LatticePmf or a mapping from sites to masses
    :type pmf: Union[LatticePmf, Mapping]
    :return: Pspm with norm equal to the total mass of pmf
    :rtype: Pspm
    :raises MassError: If the total mass exceeds 1 + 1e-12
    """
    pmf = _as_lattice_pmf(pmf)
    return Pspm(
        levels=np.ones(len(pmf), dtype=np.int64), sites=pmf.sites, masses=pmf.probs
    )


def level_pmf(f: Pspm, level: int = 1) -> LatticePmf:
    """Restriction of f to a single level, as a mass function on Z^d"""
    mask = f.levels == level
    return LatticePmf(sites=f.sites[mask], probs=f.masses[mask])


def translate(
    f: Pspm,
    offsets: Optional[Mapping[int, Sequence[int]]] = None,
    level_map: Optional[Mapping[int, int]] = None,
) -> Pspm:
    """
    Act on f by per level translations and a relabeling of levels, returning g with
    g(sigma(n), x) = f(n, x + x_n)

    :param f: Pspm to transform
    :type f: Pspm
    :param offsets: Translation vector x_n for each level n (missing levels are not
        translated)
    :type offsets: Optional[Mapping[int, Sequence[int]]]
    :param level_map: Injective level relabeling sigma (missing levels keep their
        label)
    :type level_map: Optional[Mapping[int, int]]
    :return: The transformed Pspm, at distance 0 from f
    :rtype: Pspm
    """
    offsets = {} if offsets is None else offsets
    level_map = {} if level_map is None else level_map
    levels = f.level_set()
    new_levels = [int(level_map.get(lv, lv)) for lv in levels]
    if len(set(new_levels)) != len(new_levels):
        raise ValueError(
            f"Level relabeling must be injective on the levels {levels}, but maps "
            f"them to {new_levels}"
        )
    relabel = dict(zip(levels, new_levels))
    shift = np.zeros_like(f.sites)
    for lv, x in offsets.items():
        shift[f.levels == lv] = np.asarray(_as_site(x), dtype=np.int64)
    return Pspm(
        levels=np.array([relabel[int(lv)] for lv in f.levels], dtype=np.int64),
        sites=f.sites - shift,
        masses=f.masses,
    )


def truncate(f: Pspm, keep: int) -> Pspm:
    """
    Keep the `keep` largest atoms of f

    :param f: Pspm to truncate
    :type f: Pspm
    :param keep: Number of atoms to keep, at least 1
    :type keep: int
    :return: Truncated Pspm, ties broken lexicographically on (level, site)
    :rtype: Pspm
    """
    if keep < 1:
        raise ValueError(f"keep must be at least 1, but received {keep}")
    if len(f) <= keep:
        return f
    kept = np.sort(_descending_order(f)[:keep])
    return Pspm(levels=f.levels[kept], sites=f.sites[kept], masses=f.masses[kept])


def canonical_form(f: Pspm) -> Pspm:
    """
    Canonical representative of the orbit of f under per level translations and
    level relabeling

    :param f: Pspm
    :type f: Pspm
    :return: Representative with each level shifted so its lexicographically
        smallest site is the origin, and levels relabeled 1, 2, ... by descending
        level mass, then by lexicographic atom list
    :rtype: Pspm

    .. note::

       Two Pspms are in the same orbit exactly when their canonical forms are
       equal, up to the floating point order of equal level masses.
    """
    blocks = []
    for lv in f.level_set():
        mask = f.levels == lv
        sites = f.sites[mask] - f.sites[mask][0]
        masses = f.masses[mask]
        key = tuple(
            (tuple(int(c) for c in x), float(m)) for x, m in zip(sites, masses)
        )
        blocks.append((-float(masses.sum()), key, sites, masses))
    blocks.sort(key=lambda b: (b[0], b[1]))
    if not blocks:
        return Pspm.zero(f.d)
    return Pspm(
        levels=np.concatenate(
            [np.full(len(b[3]), i + 1, dtype=np.int64) for i, b in enumerate(blocks)]
        ),
        sites=np.concatenate([b[2] for b in blocks]),
        masses=np.concatenate([b[3] for b in blocks]),
    )


def recover_orbit(
    f: Pspm, g: Pspm, tol: float = MASS_TOL
) -> Optional[Tuple[Dict[int, int], Dict[int, Tuple[int, ...]]]]:
    """
    Search for a level bijection sigma and translations x_n with
    g(sigma(n), x) = f(n, x + x_n)

    :param f: Source Pspm
    :type f: Pspm
    :param g: Target Pspm
    :type g: Pspm
    :param tol: Tolerance on the masses of matched atoms
    :type tol: float
    :return: Tuple of (sigma, offsets) as dictionaries keyed by the levels of f, or
        None if g is not in the orbit of f
    :rtype: Optional[Tuple[Dict[int, int], Dict[int, Tuple[int, ...]]]]

    .. note::

       A translation preserves the lexicographic order of a level, so the offset
       between two compatible levels is fixed by their smallest sites. The level
       bijection is then found as a perfect matching of compatible levels.
    """
    f_levels, g_levels = f.level_set(), g.level_set()
    if len(f_levels) != len(g_levels) or f.d != g.d:
        return None
    if not f_levels:
        return {}, {}
    compatible = np.ones((len(f_levels), len(g_levels)))
    for i, lf in enumerate(f_levels):
        f_mask = f.levels == lf
        for j, lg in enumerate(g_levels):
            g_mask = g.levels == lg
            if f_mask.sum() != g_mask.sum():
                continue
            f_sites, g_sites = f.sites[f_mask], g.sites[g_mask]
            same_shape = np.array_equal(f_sites - f_sites[0], g_sites - g_sites[0])
            if same_shape and np.all(np.abs(f.masses[f_mask] - g.masses[g_mask]) <= tol):
                compatible[i, j] = 0.0
    rows, cols = linear_sum_assignment(compatible)
    if compatible[rows, cols].sum() > 0:
        return None
    sigma = {}
    offsets = {}
    for i, j in zip(rows, cols):
        lf, lg = f_levels[i], g_levels[j]
        sigma[lf] = lg
        f_first = f.sites[f.levels == lf][0]
        g_first = g.sites[g.levels == lg][0]
        offsets[lf] = tuple(int(c) for c in f_first - g_first)
    return sigma, offsets


# endregion Pspm Functions

# region Empirical Measure


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """
    Uniformly weighted finite collection of Pspm atoms

    :param atoms: The atoms, each with weight 1/len(atoms)
    :type atoms: Tuple[Pspm, ...]
    """

    atoms: Tuple[Pspm, ...]

    def __post_init__(self):
        atoms = tuple(self.atoms)
        if not atoms:
            raise ValueError("An empirical measure needs at least one atom")
        object.__setattr__(self, "atoms", atoms)

    @property
    def weights(self) -> np.ndarray:
        return np.full(len(self.atoms), 1.0 / len(self.atoms))

    def __len__(self) -> int:
        return len(self.atoms)


# endregion Empirical Measure
