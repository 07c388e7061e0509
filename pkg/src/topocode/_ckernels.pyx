# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Every function here has a behaviourally identical twin in ``_purepy``;
``topocode._backend`` picks one at import time.
"""
import numpy as np

cimport numpy as cnp
from libcpp.vector cimport vector

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline void _symdiff(vector[i64]& a, vector[i64]& b, vector[i64]& out) noexcept nogil:
    # a, b sorted ascending; out <- a xor b, sorted ascending
    cdef size_t i = 0, j = 0, na = a.size(), nb = b.size()
    out.clear()
    while i < na and j < nb:
        if a[i] < b[j]:
            out.push_back(a[i])
            i += 1
        elif b[j] < a[i]:
            out.push_back(b[j])
            j += 1
        else:
            i += 1
            j += 1
    while i < na:
        out.push_back(a[i])
        i += 1
    while j < nb:
        out.push_back(b[j])
        j += 1


def reduce_boundary(const i64[::1] indptr, const i64[::1] indices,
                    const cnp.int8_t[::1] dims, int max_dim):
    """Z/2 column reduction with clearing.

    Columns are processed from ``max_dim`` down to 1; inside a dimension
    they go left to right.  Returns ``low`` where ``low[j]`` is the pivot
    row of reduced column ``j`` or -1.
    """
    cdef Py_ssize_t n = dims.shape[0]
    low = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] low_v = low
    cdef vector[i64] owner
    cdef vector[char] cleared
    cdef vector[vector[i64]] reduced
    cdef vector[i64] col, tmp
    cdef Py_ssize_t j, k
    cdef i64 piv, own
    cdef int d
    owner.assign(n, -1)
    cleared.assign(n, 0)
    reduced.resize(n)
    with nogil:
        for d in range(max_dim, 0, -1):
            for j in range(n):
                if dims[j] != d or cleared[j]:
                    continue
                col.clear()
                for k in range(indptr[j], indptr[j + 1]):
                    col.push_back(indices[k])
                while not col.empty():
                    piv = col.back()
                    own = owner[piv]
                    if own < 0:
                        break
                    _symdiff(col, reduced[own], tmp)
                    col.swap(tmp)
                if not col.empty():
                    piv = col.back()
                    low_v[j] = piv
                    owner[piv] = j
                    reduced[j] = col
                    cleared[piv] = 1
    return low


def hungarian(const double[:, ::1] cost):
    """Minimum-cost perfect assignment on a square matrix.

    Shortest augmenting path with row/column potentials, O(n^3).
    Returns ``col_of_row``.
    """
    cdef Py_ssize_t n = cost.shape[0]
    if cost.shape[1] != n:
        raise ValueError("cost matrix must be square")
    col_of_row = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return col_of_row
    cdef double inf = float("inf")
    cdef vector[double] u, v, minv
    cdef vector[i64] p, way
    cdef vector[char] used
    cdef Py_ssize_t i, j, j0, j1, i0
    cdef double delta, cur
    cdef i64[::1] out = col_of_row
    u.assign(n + 1, 0.0)
    v.assign(n + 1, 0.0)
    p.assign(n + 1, 0)
    way.assign(n + 1, 0)
    minv.assign(n + 1, inf)
    used.assign(n + 1, 0)
    with nogil:
        for i in range(1, n + 1):
            p[0] = i
            j0 = 0
            for j in range(n + 1):
                minv[j] = inf
                used[j] = 0
            while True:
                used[j0] = 1
                i0 = p[j0]
                delta = inf
                j1 = 0
                for j in range(1, n + 1):
                    if not used[j]:
                        cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                        if cur < minv[j]:
                            minv[j] = cur
                            way[j] = j0
                        if minv[j] < delta:
                            delta = minv[j]
                            j1 = j
                for j in range(n + 1):
                    if used[j]:
                        u[p[j]] += delta
                        v[j] -= delta
                    else:
                        minv[j] -= delta
                j0 = j1
                if p[j0] == 0:
                    break
            while True:
                j1 = way[j0]
                p[j0] = p[j1]
                j0 = j1
                if j0 == 0:
                    break
        for j in range(1, n + 1):
            out[p[j] - 1] = j - 1
    return col_of_row


def viterbi(const double[:, ::1] soft, const i64[:, ::1] next_state,
            const i64[:, :, ::1] branch_sign):
    """Soft-decision Viterbi over a terminated trellis.

    ``soft[t, r]`` is the received value of output ``r`` at step ``t``
    (0 for punctured positions).  ``branch_sign[s, b, r]`` is +1/-1 for
    the coded bit emitted from state ``s`` on input ``b``.  The path
    metric is the correlation, maximised; the survivor ending in state 0
    is traced back.
    """
    cdef Py_ssize_t steps = soft.shape[0], nout = soft.shape[1]
    cdef Py_ssize_t nstates = next_state.shape[0]
    decoded = np.zeros(steps, dtype=np.uint8)
    if steps == 0:
        return decoded
    cdef cnp.uint8_t[::1] dec = decoded
    cdef double neg = -float("inf")
    cdef vector[double] pm, nxt
    cdef vector[i64] prev_state
    cdef vector[char] prev_bit
    cdef Py_ssize_t t, s, b, r, ns
    cdef double m
    pm.assign(nstates, neg)
    nxt.assign(nstates, neg)
    prev_state.assign(steps * nstates, 0)
    prev_bit.assign(steps * nstates, 0)
    pm[0] = 0.0
    with nogil:
        for t in range(steps):
            for s in range(nstates):
                nxt[s] = neg
            for s in range(nstates):
                if pm[s] == neg:
                    continue
                for b in range(2):
                    m = pm[s]
                    for r in range(nout):
                        m += soft[t, r] * branch_sign[s, b, r]
                    ns = next_state[s, b]
                    if m > nxt[ns]:
                        nxt[ns] = m
                        prev_state[t * nstates + ns] = s
                        prev_bit[t * nstates + ns] = <char>b
            pm.swap(nxt)
        s = 0
        for t in range(steps - 1, -1, -1):
            dec[t] = <cnp.uint8_t>prev_bit[t * nstates + s]
            s = prev_state[t * nstates + s]
    return decoded
