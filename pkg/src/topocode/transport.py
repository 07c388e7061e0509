"""Wasserstein and bottleneck distances between persistence diagrams.

Finite pairs are matched with the usual diagonal augmentation: an
``(m1 + m2)``-square assignment problem whose extra rows and columns stand
for diagonal points.  The ground metric is L-infinity.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from ._backend import kernels

# cost charged for an essential class with no partner of the same dimension
ESSENTIAL_PENALTY = 1.0


def diagonal_cost(birth, death):
    """L-infinity distance from (birth, death) to the diagonal."""
    return (np.asarray(death, dtype=np.float64) - np.asarray(birth, dtype=np.float64)) / 2.0


@dataclass(frozen=True, eq=False)
class DiagramMatching:
    """Optimal partial matching between the finite pairs of two diagrams.

    ``matched`` holds ``(i, j)`` index pairs into diagram 1 / diagram 2 with
    their L-infinity costs in ``matched_costs``; ``to_diagonal_1`` /
    ``to_diagonal_2`` list the pairs sent to the diagonal.  Essential
    classes are matched separately (sorted births against sorted births);
    unpartnered essentials appear in ``essential_unmatched_*`` and cost
    ``ESSENTIAL_PENALTY`` each.
    """

    p: float
    distance: float
    matched: list = field(default_factory=list)
    matched_costs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    to_diagonal_1: list = field(default_factory=list)
    diagonal_costs_1: np.ndarray = field(default_factory=lambda: np.zeros(0))
    to_diagonal_2: list = field(default_factory=list)
    diagonal_costs_2: np.ndarray = field(default_factory=lambda: np.zeros(0))
    essential_matched: list = field(default_factory=list)
    essential_costs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    essential_unmatched_1: list = field(default_factory=list)
    essential_unmatched_2: list = field(default_factory=list)

    def all_costs(self):
        penalties = [ESSENTIAL_PENALTY] * (len(self.essential_unmatched_1)
                                           + len(self.essential_unmatched_2))
        return np.concatenate([self.matched_costs, self.diagonal_costs_1,
                               self.diagonal_costs_2, self.essential_costs,
                               np.asarray(penalties, dtype=np.float64)])


def _aggregate(costs, p):
    if costs.size == 0:
        return 0.0
    if math.isinf(p):
        return float(costs.max())
    # exact summation keeps d(A, B) == d(B, A) bit for bit
    return math.fsum(np.sort(costs) ** p) ** (1.0 / p)


def _ground_costs(a, b):
    """Pairwise L-infinity distances, plus each pair's diagonal cost."""
    cross = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2) if len(a) and len(b) \
        else np.zeros((len(a), len(b)))
    return cross, diagonal_cost(a[:, 0], a[:, 1]), diagonal_cost(b[:, 0], b[:, 1])


def augmented_costs(a, b):
    """(m1+m2)-square matrix of L-infinity costs.

    Rows: the m1 pairs of ``a`` then m2 diagonal slots; columns: the m2
    pairs of ``b`` then m1 diagonal slots.  Diagonal slots are
    interchangeable, so a pair pays its diagonal cost for any of them.
    """
    m1, m2 = len(a), len(b)
    cross, da, db = _ground_costs(a, b)
    c = np.zeros((m1 + m2, m1 + m2))
    c[:m1, :m2] = cross
    c[:m1, m2:] = da[:, None]
    c[m1:, :m2] = db[None, :]
    return c


def _bottleneck_assignment(c):
    """Assignment minimising the maximum entry: binary search over the
    sorted distinct costs, feasibility by maximum bipartite matching."""
    n = c.shape[0]
    candidates = np.unique(c)
    lo, hi = 0, len(candidates) - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        graph = csr_matrix((c <= candidates[mid]).astype(np.int8))
        col_of_row = maximum_bipartite_matching(graph, perm_type="column")
        if np.all(col_of_row >= 0):
            best = col_of_row
            hi = mid - 1
        else:
            lo = mid + 1
    return np.asarray(best, dtype=np.int64) if best is not None else np.zeros(n, dtype=np.int64)


def match_pairs(a, b, p=2.0):
    """Optimal augmented assignment between two ``(k, 2)`` arrays of pairs.

    Returns ``(matched, matched_costs, diag1, diag1_costs, diag2, diag2_costs)``.
    """
    a = np.asarray(a, dtype=np.float64).reshape(-1, 2)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 2)
    m1, m2 = len(a), len(b)
    if m1 + m2 == 0:
        empty = np.zeros(0)
        return [], empty, [], empty, [], empty
    c = augmented_costs(a, b)
    if math.isinf(p):
        col_of_row = _bottleneck_assignment(c)
    else:
        col_of_row = kernels.hungarian(np.ascontiguousarray(c ** p))
    matched, mcost, d1, d1c = [], [], [], []
    for i in range(m1):
        j = int(col_of_row[i])
        if j < m2:
            matched.append((i, j))
            mcost.append(c[i, j])
        else:
            d1.append(i)
            d1c.append(c[i, j])
    hit = set(int(col_of_row[i]) for i in range(m1))
    d2 = [j for j in range(m2) if j not in hit]
    d2c = [c[m1, j] for j in d2]
    return (matched, np.asarray(mcost, dtype=np.float64), d1, np.asarray(d1c, dtype=np.float64),
            d2, np.asarray(d2c, dtype=np.float64))


def match_essential(e1, e2):
    """Sorted-order matching of essential births; returns matched index
    pairs, their costs, and the unmatched indices on each side."""
    o1 = np.argsort(e1, kind="stable")
    o2 = np.argsort(e2, kind="stable")
    k = min(len(o1), len(o2))
    pairs = [(int(o1[t]), int(o2[t])) for t in range(k)]
    costs = np.asarray([abs(e1[i] - e2[j]) for i, j in pairs], dtype=np.float64)
    return pairs, costs, [int(i) for i in o1[k:]], [int(j) for j in o2[k:]]


def wasserstein(d1, d2, h, p=2.0):
    """p-Wasserstein distance between dimension-``h`` parts of two diagrams.

    ``p = math.inf`` gives the bottleneck distance.  Returns
    ``(distance, DiagramMatching)``.
    """
    p = float(p)
    if not (p >= 1.0):
        raise ValueError("order p must be >= 1 or inf")
    g1, g2 = d1[h], d2[h]
    matched, mc, diag1, dc1, diag2, dc2 = match_pairs(g1.pairs, g2.pairs, p)
    ess, ec, eu1, eu2 = match_essential(g1.essential, g2.essential)
    m = DiagramMatching(p=p, distance=0.0, matched=matched, matched_costs=mc,
                        to_diagonal_1=diag1, diagonal_costs_1=dc1,
                        to_diagonal_2=diag2, diagonal_costs_2=dc2,
                        essential_matched=ess, essential_costs=ec,
                        essential_unmatched_1=eu1, essential_unmatched_2=eu2)
    dist = _aggregate(m.all_costs(), p)
    object.__setattr__(m, "distance", dist)
    return dist, m


def bottleneck(d1, d2, h):
    return wasserstein(d1, d2, h, math.inf)[0]


def total_distance(d1, d2, p=2.0, dims=(0, 1)):
    """Plain sum of the per-dimension distances over ``dims``."""
    return float(sum(wasserstein(d1, d2, h, p)[0] for h in dims))
