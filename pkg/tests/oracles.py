"""Independent reference implementations used by the tests.

Nothing here imports the package's persistence or matching code; the
oracles work from first principles on small inputs.
"""
import itertools
import math

import numpy as np

NEIGHBOURS_8 = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]


def union_find_h0(f):
    """H0 barcode of the sublevel filtration of ``f`` (closed pixel squares,
    hence 8-connectivity).  Returns sorted finite ``(birth, death)`` pairs
    with death > birth, and the sorted essential births."""
    h, w = f.shape
    parent = {}
    birth = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pairs = []
    order = sorted(((f[r, c], r * w + c) for r in range(h) for c in range(w)))
    for value, idx in order:
        r, c = divmod(idx, w)
        parent[idx] = idx
        birth[idx] = value
        for dr, dc in NEIGHBOURS_8:
            rr, cc = r + dr, c + dc
            if not (0 <= rr < h and 0 <= cc < w) or (rr * w + cc) not in parent:
                continue
            a, b = find(idx), find(rr * w + cc)
            if a == b:
                continue
            # elder rule: the younger root dies now
            young, old = (a, b) if (birth[a], a) > (birth[b], b) else (b, a)
            if value > birth[young]:
                pairs.append((birth[young], value))
            parent[young] = old
    roots = {find(x) for x in parent}
    return sorted(pairs), sorted(birth[r] for r in roots)


def _gf2_rank(m):
    m = m.copy() % 2
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if m[r, c]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def cubical_cells(f):
    """Cells of the closed-square complex of ``f`` as a dict keyed by grid
    coordinate ``(r, c)`` in the ``(2H+1, 2W+1)`` grid, each with its
    dimension and value (minimum over incident pixels)."""
    h, w = f.shape
    cells = {}
    for r in range(2 * h + 1):
        for c in range(2 * w + 1):
            rows = {(r - 1) // 2, r // 2} & set(range(h))
            cols = {(c - 1) // 2, c // 2} & set(range(w))
            cells[(r, c)] = ((r % 2) + (c % 2), min(f[i, j] for i in rows for j in cols))
    return cells


def betti_numbers(f, threshold):
    """(beta0, beta1) of the sublevel complex at ``threshold`` by ranks of
    Z/2 boundary matrices."""
    cells = {k: v for k, v in cubical_cells(f).items() if v[1] <= threshold}
    by_dim = {d: sorted(k for k, v in cells.items() if v[0] == d) for d in range(3)}
    index = {d: {cell: i for i, cell in enumerate(by_dim[d])} for d in range(3)}

    def boundary(d):
        m = np.zeros((len(by_dim[d - 1]), len(by_dim[d])), dtype=np.uint8)
        for j, (r, c) in enumerate(by_dim[d]):
            faces = []
            if r % 2:
                faces += [(r - 1, c), (r + 1, c)]
            if c % 2:
                faces += [(r, c - 1), (r, c + 1)]
            for face in faces:
                m[index[d - 1][face], j] = 1
        return m

    r1 = _gf2_rank(boundary(1)) if by_dim[1] and by_dim[0] else 0
    r2 = _gf2_rank(boundary(2)) if by_dim[2] and by_dim[1] else 0
    return len(by_dim[0]) - r1, len(by_dim[1]) - r1 - r2


def euler_by_counting(f, threshold):
    counts = [0, 0, 0]
    for dim, value in cubical_cells(f).values():
        if value <= threshold:
            counts[dim] += 1
    return counts[0] - counts[1] + counts[2]


def exhaustive_wasserstein(a, b, p, ess_a=(), ess_b=(), penalty=1.0):
    """Brute force over every partial injection from ``a`` to ``b`` with
    the L-infinity ground metric; leftovers pay half their persistence.
    Essential births are matched in sorted order, surplus ones pay
    ``penalty``."""
    a = [tuple(x) for x in a]
    b = [tuple(x) for x in b]
    ea, eb = sorted(ess_a), sorted(ess_b)
    extra = [abs(x - y) for x, y in zip(ea, eb)] + [penalty] * abs(len(ea) - len(eb))

    def agg(costs):
        if not costs:
            return 0.0
        if math.isinf(p):
            return max(costs)
        return math.fsum(c ** p for c in costs) ** (1.0 / p)

    def diag(x):
        return (x[1] - x[0]) / 2.0

    best = math.inf
    for k in range(min(len(a), len(b)) + 1):
        for rows in itertools.combinations(range(len(a)), k):
            for cols in itertools.permutations(range(len(b)), k):
                costs = [max(abs(a[i][0] - b[j][0]), abs(a[i][1] - b[j][1]))
                         for i, j in zip(rows, cols)]
                costs += [diag(a[i]) for i in range(len(a)) if i not in rows]
                costs += [diag(b[j]) for j in range(len(b)) if j not in cols]
                best = min(best, agg(costs + extra))
    if not a and not b:
        best = agg(extra)
    return best


def random_diagram_pairs(rng, max_pairs=4):
    k = int(rng.integers(0, max_pairs + 1))
    x = rng.uniform(0, 1, size=(k, 2))
    lo, hi = x.min(axis=1), x.max(axis=1)
    keep = hi > lo
    return np.column_stack([lo[keep], hi[keep]])
