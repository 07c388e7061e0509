"""Compare the compiled kernels with their numpy twins.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``.  Each kernel
is fed identical inputs under both backends; outputs are checked for
equality before timings are reported.
"""
import argparse
import time

import numpy as np

from topocode import _backend
from topocode.baselines import ConvCode, conv_encode
from topocode.channel import bpsk_modulate, noise_sigma
from topocode.datasets import load_dataset
from topocode.homology import _sorted_boundary, build_complex, normalize


def _best_of(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def reduction_case(seed):
    raw = load_dataset("digits", 1)[0]
    rng = np.random.default_rng(seed)
    noisy = np.clip(raw.astype(float) + rng.normal(0, 40, raw.shape), 0, 255).astype(np.uint8)
    _, indptr, indices, dims, _ = _sorted_boundary(build_complex(normalize(noisy)))
    return "reduce_boundary (28x28 noisy digit)", lambda k: k.reduce_boundary(indptr, indices, dims, 2)


def hungarian_case(seed, n=120):
    cost = np.random.default_rng(seed).random((n, n))
    return f"hungarian ({n}x{n})", lambda k: k.hungarian(cost)


def viterbi_case(seed, n_bits=2000):
    code = ConvCode()
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, n_bits, dtype=np.uint8)
    x = bpsk_modulate(conv_encode(bits, code))
    y = x + noise_sigma(3.0) * rng.standard_normal(x.shape)
    steps = n_bits + code.tail
    keep = code.keep_mask(steps)
    soft = np.zeros(keep.shape)
    soft[keep] = y
    signs = np.ascontiguousarray(1 - 2 * code.outputs.astype(np.int64))
    return f"viterbi ({n_bits} bits, K=7)", lambda k: k.viterbi(soft, code.next_state, signs)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _backend.compiled is None:
        print("compiled extension not built; only the numpy backend is available")
    print(f"{'kernel':40s} {'numpy [s]':>10s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, run in (reduction_case(args.seed), hungarian_case(args.seed), viterbi_case(args.seed)):
        t_py, out_py = _best_of(lambda: run(_backend.purepy), args.repeat)
        if _backend.compiled is None:
            print(f"{name:40s} {t_py:10.4f} {'-':>11s} {'-':>8s}")
            continue
        t_c, out_c = _best_of(lambda: run(_backend.compiled), args.repeat)
        if not np.array_equal(np.asarray(out_py), np.asarray(out_c)):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:40s} {t_py:10.4f} {t_c:11.4f} {t_py / t_c:7.1f}x")


if __name__ == "__main__":
    main()
