"""Pure-Python/numpy versions of the compiled kernels.

Same signatures and the same tie-breaking as ``_ckernels``, so either
backend produces identical results.
"""
import numpy as np


def reduce_boundary(indptr, indices, dims, max_dim):
    n = len(dims)
    low = np.full(n, -1, dtype=np.int64)
    owner = {}
    reduced = {}
    cleared = np.zeros(n, dtype=bool)
    dims = np.asarray(dims)
    for d in range(max_dim, 0, -1):
        for j in np.flatnonzero(dims == d):
            if cleared[j]:
                continue
            col = set(indices[indptr[j]:indptr[j + 1]].tolist())
            while col:
                piv = max(col)
                own = owner.get(piv)
                if own is None:
                    break
                col ^= reduced[own]
            if col:
                piv = max(col)
                low[j] = piv
                owner[piv] = j
                reduced[j] = col
                cleared[piv] = True
    return low


def hungarian(cost):
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    n = cost.shape[0]
    if cost.ndim != 2 or cost.shape[1] != n:
        raise ValueError("cost matrix must be square")
    col_of_row = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return col_of_row
    # 1-based potentials; column 0 is the virtual start column
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while True:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
            if j0 == 0:
                break
    col_of_row[p[1:] - 1] = np.arange(n)
    return col_of_row


def viterbi(soft, next_state, branch_sign):
    soft = np.asarray(soft, dtype=np.float64)
    steps = soft.shape[0]
    nstates = next_state.shape[0]
    decoded = np.zeros(steps, dtype=np.uint8)
    if steps == 0:
        return decoded
    # transitions in (state, bit) order so argmax ties match the C loop
    src = np.repeat(np.arange(nstates), 2)
    bit = np.tile(np.arange(2), nstates)
    dst = next_state[src, bit]
    order = np.lexsort((np.arange(len(dst)), dst))
    src, bit, dst = src[order], bit[order], dst[order]
    fan_in = np.bincount(dst, minlength=nstates)
    if not np.all(fan_in == fan_in[0]):
        raise ValueError("trellis must have uniform fan-in")
    k = fan_in[0]
    src = src.reshape(nstates, k)
    bit = bit.reshape(nstates, k)
    signs = branch_sign[src, bit].astype(np.float64)  # (nstates, k, nout)
    pm = np.full(nstates, -np.inf)
    pm[0] = 0.0
    prev_state = np.zeros((steps, nstates), dtype=np.int64)
    prev_bit = np.zeros((steps, nstates), dtype=np.uint8)
    rows = np.arange(nstates)
    for t in range(steps):
        cand = pm[src]
        for r in range(soft.shape[1]):
            cand = cand + soft[t, r] * signs[:, :, r]
        best = np.argmax(cand, axis=1)
        prev_state[t] = src[rows, best]
        prev_bit[t] = bit[rows, best]
        pm = cand[rows, best]
    s = 0
    for t in range(steps - 1, -1, -1):
        decoded[t] = prev_bit[t, s]
        s = prev_state[t, s]
    return decoded
