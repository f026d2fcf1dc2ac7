#!/usr/bin/env python3
"""Benchmark the compiled walk kernels against the pure-numpy fallback.

Runs the hot evolution loops on representative workloads and prints a
throughput table.  Results from both backends are checked for bit
equality while timing.

Usage: python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import math
import time

import numpy as np

from qwlearn import _kernels_py
from qwlearn.walk import CoinSpec, make_coin

try:
    from qwlearn import _kernels as _compiled
except ImportError:
    _compiled = None


def origin_amps(half_width):
    amps = np.zeros((2, 2 * half_width + 1), dtype=np.complex128)
    amps[0, half_width] = amps[1, half_width] = 1 / math.sqrt(2)
    return amps


def bench(fn, repeats):
    best = math.inf
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def workloads():
    coin = make_coin(CoinSpec(math.pi / 4))
    coin2 = make_coin(CoinSpec(math.pi / 3))

    def standard_500(mod):
        amps = origin_amps(500)
        mod.evolve_standard(amps, coin, 500)
        return amps

    def recorded_499(mod):
        amps = origin_amps(499)
        record = np.empty((499, amps.shape[1]))
        mod.evolve_standard(amps, coin, 499, record)
        return record

    def split_200(mod):
        amps = origin_amps(200)
        mod.evolve_split(amps, coin, coin2, 200)
        return amps

    def sweep_slice(mod):
        # ten theta points of the (theta, steps) grid workload
        out = None
        for theta in np.linspace(0.1, 1.4, 10):
            c = make_coin(CoinSpec(theta))
            amps = origin_amps(499)
            record = np.empty((499, amps.shape[1]))
            mod.evolve_standard(amps, c, 499, record)
            out = record
        return out

    return [
        ("standard walk, N=500", standard_500),
        ("recorded walk, N=499", recorded_499),
        ("split-step walk, N=200", split_200),
        ("10-point recorded sweep", sweep_slice),
    ]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    if _compiled is None:
        print("compiled extension not available; benchmarking the fallback only")
    header = f"{'workload':<26} {'numpy (ms)':>12} {'compiled (ms)':>14} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, fn in workloads():
        t_py = bench(lambda: fn(_kernels_py), args.repeats) * 1e3
        if _compiled is None:
            print(f"{name:<26} {t_py:>12.2f} {'-':>14} {'-':>9}")
            continue
        t_c = bench(lambda: fn(_compiled), args.repeats) * 1e3
        same = np.array_equal(fn(_compiled), fn(_kernels_py))
        flag = "" if same else "  (MISMATCH!)"
        print(f"{name:<26} {t_py:>12.2f} {t_c:>14.2f} {t_py / t_c:>8.1f}x{flag}")


if __name__ == "__main__":
    main()
