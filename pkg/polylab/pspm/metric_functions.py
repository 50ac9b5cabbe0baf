"""
The alpha-distance between partitioned subprobability measures,

    d_{alpha,phi}(f, g) = alpha sum_{u in A} |f(u) - g(phi(u))| + sum_{u not in A} f(u)^alpha
                          + sum_{u not in phi(A)} g(u)^alpha + 2^(-deg(phi)),

and the metric d_alpha(f, g), the infimum over injective phi. The infimum is computed
exactly by branch and bound over maps between the two supports for small supports,
and bounded above by a translation-alignment heuristic for larger ones.
"""

# Standard Library Imports
from __future__ import annotations
import math
from typing import Dict, List, Optional, Tuple

# External Imports
import numpy as np

# Local Imports
from polylab.pspm.isometry import Isometry, _degree_arrays, _pair_differences
from polylab.pspm.pspm import Pspm, _descending_order
from polylab.utils.polylab_exceptions import EnumerationSizeError

DEFAULT_SUPPORT_CAP = 8
# Number of top atoms used as translation anchors for large supports
ANCHOR_ATOMS = 4
# Supports up to this size get every atom as an anchor, and local search
LOCAL_SEARCH_SUPPORT = 12
_LOCAL_SEARCH_ROUNDS = 50

Match = List[Tuple[int, int]]


def _check_alpha(alpha: float) -> float:
    if isinstance(alpha, bool) or not alpha > 1.0:
        raise ValueError(f"alpha must be greater than 1, but received {alpha}")
    return float(alpha)


# region Distance According to an Isometry
def d_alpha_phi(f: Pspm, g: Pspm, phi: Isometry, alpha: float) -> float:
    """
    Alpha-distance between f and g according to the isometry phi

    :param f: First Pspm
    :type f: Pspm
    :param g: Second Pspm
    :type g: Pspm
    :param phi: Injective partial map, its sources and targets may lie off the
        supports (where the masses are zero)
    :type phi: Isometry
    :param alpha: Exponent, greater than 1
    :type alpha: float
    :return: d_{alpha,phi}(f, g), with 2^(-inf) = 0
    :rtype: float
    """
    alpha = _check_alpha(alpha)
    f_map, g_map = f.as_dict(), g.as_dict()
    matched = alpha * sum(
        abs(f_map.get(u, 0.0) - g_map.get(v, 0.0)) for u, v in phi.pairs
    )
    sources, targets = set(phi.sources), set(phi.targets)
    f_unmatched = sum(m**alpha for u, m in f_map.items() if u not in sources)
    g_unmatched = sum(m**alpha for u, m in g_map.items() if u not in targets)
    return matched + f_unmatched + g_unmatched + 2.0 ** (-phi.degree())


def _match_value(
    f: Pspm, g: Pspm, alpha: float, fa: np.ndarray, ga: np.ndarray, match: Match
) -> float:
    # d_{alpha,phi} for a map between support atoms given as index pairs
    f_free = np.ones(len(f), dtype=bool)
    g_free = np.ones(len(g), dtype=bool)
    if not match:
        return float(fa.sum() + ga.sum())
    i_idx = np.array([i for i, _ in match], dtype=np.int64)
    a_idx = np.array([a for _, a in match], dtype=np.int64)
    f_free[i_idx] = False
    g_free[a_idx] = False
    matched = alpha * float(np.abs(f.masses[i_idx] - g.masses[a_idx]).sum())
    deg = _degree_arrays(f.levels[i_idx], f.sites[i_idx], g.levels[a_idx], g.sites[a_idx])
    return matched + float(fa[f_free].sum()) + float(ga[g_free].sum()) + 2.0 ** (-deg)


def _match_isometry(f: Pspm, g: Pspm, match: Match) -> Isometry:
    atoms_f, atoms_g = f.atoms(), g.atoms()
    return Isometry(
        tuple(
            ((atoms_f[i][0], atoms_f[i][1]), (atoms_g[a][0], atoms_g[a][1]))
            for i, a in sorted(match)
        )
    )


# endregion Distance According to an Isometry


# region Exact Distance
def d_alpha_exact(
    f: Pspm, g: Pspm, alpha: float, support_cap: int = DEFAULT_SUPPORT_CAP
) -> float:
    """
    Exact alpha-distance d_alpha(f, g)

    :param f: First Pspm
    :type f: Pspm
    :param g: Second Pspm
    :type g: Pspm
    :param alpha: Exponent, greater than 1
    :type alpha: float
    :param support_cap: Largest support size accepted for either argument
    :type support_cap: int
    :return: Infimum of d_{alpha,phi}(f, g) over injective maps
    :rtype: float
    :raises EnumerationSizeError: If either support is larger than support_cap

    .. note::

       Only maps between the two supports (and the empty map) are searched. A source
       with f(u) = 0 contributes alpha g(phi(u)) >= g(phi(u))^alpha, so dropping
       it never increases the distance, and likewise for targets with g = 0.
    """
    return optimal_isometry(f, g, alpha, support_cap)[0]


def optimal_isometry(
    f: Pspm, g: Pspm, alpha: float, support_cap: int = DEFAULT_SUPPORT_CAP
) -> Tuple[float, Isometry]:
    """
    Exact alpha-distance together with an isometry achieving it

    :param f: First Pspm
    :type f: Pspm
    :param g: Second Pspm
    :type g: Pspm
    :param alpha: Exponent, greater than 1
    :type alpha: float
    :param support_cap: Largest support size accepted for either argument
    :type support_cap: int
    :return: Tuple of (d_alpha(f, g), minimizing isometry)
    :rtype: Tuple[float, Isometry]
    :raises EnumerationSizeError: If either support is larger than support_cap
    """
    alpha = _check_alpha(alpha)
    if len(f) > support_cap or len(g) > support_cap:
        raise EnumerationSizeError(
            f"Exact distance is limited to supports of at most {support_cap} atoms, "
            f"but received supports of {len(f)} and {len(g)} atoms"
        )
    fa, ga = f.masses**alpha, g.masses**alpha
    best_value, best_match = _upper_search(f, g, alpha)
    if len(f) == 0 or len(g) == 0:
        return best_value, _match_isometry(f, g, best_match)
    search = _BranchAndBound(f, g, alpha, fa, ga, best_value, best_match)
    search.run()
    return search.best_value, _match_isometry(f, g, search.best_match)


class _BranchAndBound:
    """Depth first search over injective maps from the atoms of f (largest first)
    into the atoms of g, each atom of f being matched or left out"""

    def __init__(self, f, g, alpha, fa, ga, best_value, best_match):
        self.order = [int(i) for i in _descending_order(f)]
        self.s, self.t = len(f), len(g)
        self.fa = fa.tolist()
        self.ga = ga.tolist()
        diff = np.abs(f.masses[:, None] - g.masses[None, :])
        self.pair_cost = (alpha * diff).tolist()
        # Best case change in cost of matching i to a rather than leaving a unused
        self.relief = (alpha * diff - ga[None, :]).tolist()
        self.target_order = [
            sorted(range(self.t), key=lambda a: self.pair_cost[i][a])
            for i in range(self.s)
        ]
        self.violation = _violation_table(f, g)
        self.best_value = best_value
        self.best_match = list(best_match)

    def run(self):
        self._visit(0, [], 0, 0.0, math.inf)

    def _lower_bound(self, p: int, used: int, partial: float, deg: float) -> float:
        bound = partial + 2.0 ** (-deg)
        free = [a for a in range(self.t) if not used >> a & 1]
        bound += sum(self.ga[a] for a in free)
        for i in self.order[p:]:
            best = self.fa[i]
            relief = self.relief[i]
            for a in free:
                if relief[a] < best:
                    best = relief[a]
            bound += best
        return bound

    def _visit(self, p: int, match: Match, used: int, partial: float, deg: float):
        if p == self.s:
            value = (
                partial
                + sum(self.ga[a] for a in range(self.t) if not used >> a & 1)
                + 2.0 ** (-deg)
            )
            if value < self.best_value:
                self.best_value = value
                self.best_match = list(match)
            return
        if self._lower_bound(p, used, partial, deg) >= self.best_value:
            return
        i = self.order[p]
        table = self.violation[i]
        for a in self.target_order[i]:
            if used >> a & 1:
                continue
            new_deg = deg
            for j, b in match:
                v = table[j][a][b]
                if v < new_deg:
                    new_deg = v
            match.append((i, a))
            self._visit(p + 1, match, used | (1 << a), partial + self.pair_cost[i][a], new_deg)
            match.pop()
        self._visit(p + 1, match, used, partial + self.fa[i], deg)


def _violation_table(f: Pspm, g: Pspm) -> List:
    # table[i][j][a][b]: violation value when i -> a and j -> b, inf if none
    f_norm, f_diff, f_same = _pair_differences(f.levels, f.sites)
    g_norm, g_diff, g_same = _pair_differences(g.levels, g.sites)
    same_diff = np.all(f_diff[:, :, None, None, :] == g_diff[None, None, :, :, :], axis=-1)
    fs = f_same[:, :, None, None]
    gs = g_same[None, None, :, :]
    agree = (fs & gs & same_diff) | (~fs & ~gs)
    table = np.where(
        agree, np.inf, np.minimum(f_norm[:, :, None, None], g_norm[None, None, :, :])
    )
    return table.tolist()


# endregion Exact Distance


# region Upper Bound
def d_alpha_upper(f: Pspm, g: Pspm, alpha: float) -> float:
    """
    Heuristic upper bound on d_alpha(f, g)

    :param f: First Pspm
    :type f: Pspm
    :param g: Second Pspm
    :type g: Pspm
    :param alpha: Exponent, greater than 1
    :type alpha: float
    :return: Smallest d_{alpha,phi}(f, g) over the candidate maps, never below the
        exact distance
    :rtype: float

    .. note::

       Candidates are the empty map and translation alignments: anchoring an atom
       of f on an atom of g fixes a level pair and a shift, and every overlapping
       atom pair on that level pair whose matching lowers the cost is matched.
       Alignments on distinct level pairs are combined greedily, then for small
       supports the map is improved by single pair moves.
    """
    return upper_isometry(f, g, alpha)[0]


def upper_isometry(f: Pspm, g: Pspm, alpha: float) -> Tuple[float, Isometry]:
    """
    Heuristic upper bound on d_alpha(f, g) together with the isometry achieving it

    :param f: First Pspm
    :type f: Pspm
    :param g: Second Pspm
    :type g: Pspm
    :param alpha: Exponent, greater than 1
    :type alpha: float
    :return: Tuple of (upper bound, isometry)
    :rtype: Tuple[float, Isometry]
    """
    alpha = _check_alpha(alpha)
    value, match = _upper_search(f, g, alpha)
    return value, _match_isometry(f, g, match)


def _upper_search(f: Pspm, g: Pspm, alpha: float) -> Tuple[float, Match]:
    fa, ga = f.masses**alpha, g.masses**alpha
    best_match: Match = []
    best_value = _match_value(f, g, alpha, fa, ga, best_match)
    if len(f) == 0 or len(g) == 0:
        return best_value, best_match
    small = len(f) <= LOCAL_SEARCH_SUPPORT and len(g) <= LOCAL_SEARCH_SUPPORT
    blocks = _translation_blocks(f, g, alpha, fa, ga, _anchors(f, small), _anchors(g, small))
    for _, pairs in blocks:
        used_f = {i for i, _ in best_match}
        used_g = {a for _, a in best_match}
        if any(i in used_f or a in used_g for i, a in pairs):
            continue
        candidate = best_match + pairs
        value = _match_value(f, g, alpha, fa, ga, candidate)
        if value < best_value:
            best_value, best_match = value, candidate
    if small:
        best_value, best_match = _local_search(f, g, alpha, fa, ga, best_value, best_match)
    return best_value, sorted(best_match)


def _anchors(f: Pspm, all_atoms: bool) -> List[int]:
    order = [int(i) for i in _descending_order(f)]
    if all_atoms:
        return order
    anchors = order[:ANCHOR_ATOMS]
    seen_levels = {int(f.levels[i]) for i in anchors}
    for i in order:
        if int(f.levels[i]) not in seen_levels:
            seen_levels.add(int(f.levels[i]))
            anchors.append(i)
    return anchors


def _translation_blocks(
    f: Pspm,
    g: Pspm,
    alpha: float,
    fa: np.ndarray,
    ga: np.ndarray,
    f_anchors: List[int],
    g_anchors: List[int],
) -> List[Tuple[float, Match]]:
    g_index: Dict[Tuple[int, Tuple[int, ...]], int] = {
        (int(lv), tuple(int(c) for c in x)): a
        for a, (lv, x) in enumerate(zip(g.levels, g.sites))
    }
    seen = set()
    blocks = []
    for i in f_anchors:
        f_level = int(f.levels[i])
        members = np.flatnonzero(f.levels == f_level)
        for a in g_anchors:
            g_level = int(g.levels[a])
            shift = g.sites[a] - f.sites[i]
            key = (f_level, g_level, tuple(int(c) for c in shift))
            if key in seen:
                continue
            seen.add(key)
            pairs = []
            gain = 0.0
            for j in members:
                b = g_index.get((g_level, tuple(int(c) for c in f.sites[j] + shift)))
                if b is None:
                    continue
                pair_gain = fa[j] + ga[b] - alpha * abs(f.masses[j] - g.masses[b])
                if pair_gain > 0.0:
                    pairs.append((int(j), int(b)))
                    gain += pair_gain
            if pairs:
                blocks.append((gain, key, pairs))
    blocks.sort(key=lambda blk: (-blk[0], blk[1]))
    return [(gain, pairs) for gain, _, pairs in blocks]


def _local_search(
    f: Pspm,
    g: Pspm,
    alpha: float,
    fa: np.ndarray,
    ga: np.ndarray,
    value: float,
    match: Match,
) -> Tuple[float, Match]:
    for _ in range(_LOCAL_SEARCH_ROUNDS):
        improved = False
        used_f = {i for i, _ in match}
        used_g = {a for _, a in match}
        moves: List[Match] = []
        # Drop a pair
        moves.extend(match[:k] + match[k + 1 :] for k in range(len(match)))
        # Add a pair
        moves.extend(
            match + [(i, a)]
            for i in range(len(f))
            if i not in used_f
            for a in range(len(g))
            if a not in used_g
        )
        # Move a matched atom to a free target
        moves.extend(
            match[:k] + [(i, a)] + match[k + 1 :]
            for k, (i, _) in enumerate(match)
            for a in range(len(g))
            if a not in used_g
        )
        for candidate in moves:
            candidate_value = _match_value(f, g, alpha, fa, ga, candidate)
            if candidate_value < value:
                value, match = candidate_value, candidate
                improved = True
                break
        if not improved:
            break
    return value, match


# endregion Upper Bound


def equivalence_delta(eps: float, alpha: float, alpha_prime: float) -> float:
    """
    delta(eps) such that d_alpha(f, g) < delta implies d_alpha'(f, g) < eps

    :param eps: Target accuracy in d_alpha', positive
    :type eps: float
    :param alpha: Exponent of the controlling metric
    :type alpha: float
    :param alpha_prime: Exponent of the controlled metric
    :type alpha_prime: float
    :return: min((eps/4)^(alpha/(alpha'-1)), (alpha/alpha')(eps/4), eps/4)
    :rtype: float
    """
    alpha, alpha_prime = _check_alpha(alpha), _check_alpha(alpha_prime)
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, but received {eps}")
    quarter = eps / 4.0
    return min(quarter ** (alpha / (alpha_prime - 1.0)), alpha / alpha_prime * quarter, quarter)
