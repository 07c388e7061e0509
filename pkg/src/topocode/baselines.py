"""Classical FEC baselines: a regular (5, 20) LDPC code decoded by
normalized min-sum, and a K=7 (171, 133) convolutional code punctured to
rate 2/3 with soft-decision Viterbi decoding."""
import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import ConstructionFailure


# --------------------------------------------------------------------------
# LDPC
# --------------------------------------------------------------------------

def _regular_parity_check(n, dv, dc, rng, max_swaps=100000):
    """Random (dv, dc)-regular parity-check matrix without repeated edges
    (configuration model, duplicates repaired by socket swaps)."""
    m = n * dv // dc
    var_of_socket = np.repeat(np.arange(n), dv)
    check_of_socket = rng.permutation(np.repeat(np.arange(m), dc))
    for _ in range(max_swaps):
        key = check_of_socket * n + var_of_socket
        _, first, counts = np.unique(key, return_index=True, return_counts=True)
        dup = first[counts > 1]
        if dup.size == 0:
            break
        for s in dup:
            t = rng.integers(len(check_of_socket))
            check_of_socket[s], check_of_socket[t] = check_of_socket[t], check_of_socket[s]
    else:
        raise ConstructionFailure("could not remove repeated edges")
    H = np.zeros((m, n), dtype=np.uint8)
    H[check_of_socket, var_of_socket] = 1
    return H


def _gf2_rref(H):
    """Reduced row echelon form over GF(2); returns (R, pivot_columns)."""
    R = H.copy()
    m, n = R.shape
    pivots = []
    row = 0
    for col in range(n):
        if row == m:
            break
        hits = np.flatnonzero(R[row:, col]) + row
        if hits.size == 0:
            continue
        r = hits[0]
        if r != row:
            R[[row, r]] = R[[r, row]]
        others = np.flatnonzero(R[:, col])
        others = others[others != row]
        R[others] ^= R[row]
        pivots.append(col)
        row += 1
    return R[:row], np.asarray(pivots, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class LdpcCode:
    """Regular LDPC code with systematic encoding via the RREF of H."""

    n: int
    dv: int
    dc: int
    H: np.ndarray
    info_cols: np.ndarray
    parity_cols: np.ndarray
    parity_map: np.ndarray  # (n - k, k): parity bits = parity_map @ info mod 2
    check_vars: np.ndarray  # (m, dc)
    var_edges: np.ndarray  # (n, dv) flat edge ids into check_vars
    max_iter: int = 50
    scale: float = 0.8
    seed: int = 0

    @property
    def k(self):
        return len(self.info_cols)

    @property
    def m(self):
        return self.H.shape[0]

    @property
    def rate(self):
        return self.k / self.n

    @classmethod
    def build(cls, n=1000, dv=5, dc=20, seed=0, max_iter=50, scale=0.8, attempts=20):
        """Construct a full-rank code; rank-deficient draws are retried
        with the next seed."""
        if (n * dv) % dc:
            raise ValueError("n * dv must be divisible by dc")
        for attempt in range(attempts):
            s = seed + attempt
            H = _regular_parity_check(n, dv, dc, np.random.default_rng(s))
            R, pivots = _gf2_rref(H)
            if len(pivots) == H.shape[0]:
                break
        else:
            raise ConstructionFailure(f"no full-rank ({dv},{dc}) code in {attempts} seeds")
        info = np.setdiff1d(np.arange(n), pivots)
        check_vars = np.array([np.flatnonzero(row) for row in H], dtype=np.int64)
        edge_var = check_vars.reshape(-1)
        var_edges = np.argsort(edge_var, kind="stable").reshape(n, dv)
        return cls(n, dv, dc, H, info, pivots, R[:, info], check_vars, var_edges,
                   max_iter, scale, s)

    def encode_blocks(self, msg):
        msg = np.asarray(msg, dtype=np.uint8).reshape(-1, self.k)
        cw = np.zeros((msg.shape[0], self.n), dtype=np.uint8)
        cw[:, self.info_cols] = msg
        cw[:, self.parity_cols] = (msg.astype(np.int64) @ self.parity_map.T.astype(np.int64)) % 2
        return cw

    def syndrome(self, cw):
        cw = np.asarray(cw, dtype=np.int64).reshape(-1, self.n)
        return (cw @ self.H.T.astype(np.int64)) % 2

    def decode_blocks(self, llr):
        """Normalized min-sum; ``llr`` > 0 favours bit 0.  Returns hard
        codeword decisions ``(blocks, n)``."""
        llr = np.asarray(llr, dtype=np.float64).reshape(-1, self.n)
        cv = self.check_vars
        v2c = llr[:, cv]
        hard = (llr < 0).astype(np.uint8)
        for _ in range(self.max_iter):
            if not self.syndrome(hard).any():
                break
            sign = np.where(v2c < 0, -1.0, 1.0)
            mag = np.abs(v2c)
            total_sign = np.prod(sign, axis=2, keepdims=True)
            order = np.argsort(mag, axis=2)
            min1 = np.take_along_axis(mag, order[:, :, :1], axis=2)
            min2 = np.take_along_axis(mag, order[:, :, 1:2], axis=2)
            is_min = np.arange(self.dc)[None, None, :] == order[:, :, :1]
            c2v = self.scale * total_sign * sign * np.where(is_min, min2, min1)
            flat = c2v.reshape(c2v.shape[0], -1)
            total = llr + flat[:, self.var_edges].sum(axis=2)
            v2c = total[:, cv] - c2v
            hard = (total < 0).astype(np.uint8)
        return hard


def ldpc_encode(bits, code):
    """Encode a bit string, zero-padding to whole blocks.  Returns
    ``(codeword_bits, pad)``."""
    b = np.asarray(bits, dtype=np.uint8).reshape(-1)
    pad = (-len(b)) % code.k
    msg = np.concatenate([b, np.zeros(pad, dtype=np.uint8)])
    return code.encode_blocks(msg).reshape(-1), pad


def ldpc_decode(symbols, code, length=None):
    """Decode received BPSK soft symbols.

    Min-sum is scale invariant, so the symbols serve directly as LLRs.
    ``length`` strips the encoder's padding.
    """
    hard = code.decode_blocks(np.asarray(symbols, dtype=np.float64))
    bits = hard[:, code.info_cols].reshape(-1)
    return bits if length is None else bits[:length]


def ldpc_length(n_bits, code=None, n=1000, k=750):
    """Channel bits emitted for ``n_bits`` message bits."""
    if code is not None:
        n, k = code.n, code.k
    return math.ceil(n_bits / k) * n


# --------------------------------------------------------------------------
# Convolutional
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ConvCode:
    """Rate-1/2 feedforward code, optionally punctured.

    State = previous ``K-1`` input bits; the newest bit is the register MSB.
    ``puncture`` has one row per generator and one column per input step.
    """

    generators: tuple = (0o171, 0o133)
    constraint_length: int = 7
    puncture: tuple = ((1, 1), (1, 0))
    next_state: np.ndarray = field(init=False, repr=False)
    outputs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        K = self.constraint_length
        S = 1 << (K - 1)
        ns = np.zeros((S, 2), dtype=np.int64)
        out = np.zeros((S, 2, len(self.generators)), dtype=np.uint8)
        for s in range(S):
            for b in range(2):
                reg = (b << (K - 1)) | s
                ns[s, b] = reg >> 1
                for r, g in enumerate(self.generators):
                    out[s, b, r] = bin(reg & g).count("1") & 1
        object.__setattr__(self, "next_state", ns)
        object.__setattr__(self, "outputs", out)

    @property
    def n_states(self):
        return self.next_state.shape[0]

    @property
    def tail(self):
        return self.constraint_length - 1

    @property
    def puncture_mask(self):
        return np.asarray(self.puncture, dtype=bool)

    def keep_mask(self, steps):
        """Boolean ``(steps, n_outputs)`` mask of transmitted coded bits."""
        pm = self.puncture_mask
        cols = np.arange(steps) % pm.shape[1]
        return pm[:, cols].T

    @property
    def rate(self):
        pm = self.puncture_mask
        return pm.shape[1] / pm.sum()


def conv_encode(bits, code):
    """Terminated encoding (``K-1`` zero tail bits) followed by puncturing."""
    b = np.concatenate([np.asarray(bits, dtype=np.uint8).reshape(-1),
                        np.zeros(code.tail, dtype=np.uint8)])
    coded = np.zeros((len(b), len(code.generators)), dtype=np.uint8)
    s = 0
    ns, out = code.next_state, code.outputs
    for t, bit in enumerate(b):
        coded[t] = out[s, bit]
        s = ns[s, bit]
    return coded[code.keep_mask(len(b))]


def viterbi_decode(symbols, code, length):
    """Soft-decision Viterbi on received BPSK symbols for a ``length``-bit
    message; punctured positions are re-inserted as erasures."""
    steps = length + code.tail
    keep = code.keep_mask(steps)
    y = np.asarray(symbols, dtype=np.float64).reshape(-1)
    if len(y) != keep.sum():
        raise ValueError(f"expected {keep.sum()} symbols, got {len(y)}")
    soft = np.zeros(keep.shape)
    soft[keep] = y
    signs = (1 - 2 * code.outputs.astype(np.int64))
    decoded = kernels.viterbi(np.ascontiguousarray(soft), code.next_state,
                              np.ascontiguousarray(signs))
    return decoded[:length]


def conv_length(n_bits, code=None):
    code = code or ConvCode()
    return int(code.keep_mask(n_bits + code.tail).sum())
