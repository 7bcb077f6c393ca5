#!/usr/bin/env python3
"""Timing comparison of the numba and numpy backends on the hot kernels.

Usage:
    python3 benchmarks/bench_backends.py [--points N] [--repeats R]

The four primitives are exercised at sizes typical of the sharpness sweeps
(dense series of a few hundred harmonics on grids of a few hundred thousand
points).  The first numba call pays JIT compilation; a warmup round is run
before timing.
"""

import argparse
import time

import numpy as np

from vallee_lab import _accel


def bench(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=200_000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    t = rng.uniform(-np.pi, np.pi, args.points)
    dense_a = rng.standard_normal(400)
    dense_b = rng.standard_normal(400)
    ks = np.arange(40.0, 680.0, 40.0)
    sp_a = rng.standard_normal(ks.size)
    sp_b = rng.standard_normal(ks.size)
    w = 0.6 ** np.arange(200) * rng.standard_normal(200)

    cases = {
        "eval_trig (400 harmonics)": lambda: _accel.eval_trig(0.3, dense_a, dense_b, t),
        "eval_trig_sparse (16 harmonics)": lambda: _accel.eval_trig_sparse(ks, sp_a, sp_b, t),
        "vp_band (n=40, p=20)": lambda: _accel.vp_band(0.6, 0.7, 40, 20, t),
        "weighted_cos_sum (200 terms)": lambda: _accel.weighted_cos_sum(w, 5, 0.4, t),
    }

    results = {}
    for backend in ("numpy", "numba"):
        _accel.set_backend(backend)
        for name, fn in cases.items():
            fn()  # warm up (JIT compile on the numba path)
            results[(backend, name)] = bench(fn, args.repeats)

    width = max(len(n) for n in cases)
    print(f"{'kernel':<{width}}  {'numpy':>10}  {'numba':>10}  {'speedup':>8}")
    for name in cases:
        tn = results[("numpy", name)]
        tb = results[("numba", name)]
        print(f"{name:<{width}}  {tn * 1e3:>8.2f}ms  {tb * 1e3:>8.2f}ms  {tn / tb:>7.2f}x")

    # the two paths must agree to rounding
    _accel.set_backend("numpy")
    ref = _accel.eval_trig(0.3, dense_a, dense_b, t[:4096])
    _accel.set_backend("numba")
    got = _accel.eval_trig(0.3, dense_a, dense_b, t[:4096])
    print(f"\nmax |numpy - numba| on eval_trig: {np.max(np.abs(ref - got)):.3e}")


if __name__ == "__main__":
    main()
