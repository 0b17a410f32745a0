#!/usr/bin/env python3
"""Benchmark the compiled kernel backend against the pure-Python fallback.

Runs the three hot kernels on identical inputs for both backends, checks
the outputs agree, and prints per-call timings plus the speedup:

    python3 benchmarks/bench_kernels.py --size 200000 --repeat 5

The compiled backend is optional; if it is not importable the script
reports pure-Python numbers only.
"""

from __future__ import annotations

import argparse
import random
import time

import numpy as np

from powersum import _core_py
from powersum.counting import integer_kth_root, powers_upto

try:
    from powersum import _core
except ImportError:  # pragma: no cover - compiled extension not built
    _core = None


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_accumulate(backend, size: int, repeat: int):
    src = np.arange(1, dtype=np.int64)  # placeholder; rebuilt below
    rng = np.random.default_rng(20260816)
    src = rng.integers(0, 50, size=size + 1).astype(np.int64)
    powers = np.asarray(powers_upto(size, 3), dtype=np.int64)
    dest = np.zeros(size + 1, dtype=np.int64)

    def run():
        dest.fill(0)
        backend.accumulate_shifted_range(dest, src, powers, 0, size + 1)

    elapsed = _time(run, repeat)
    return elapsed, dest.copy()


def bench_floor_roots(backend, size: int, repeat: int):
    rng = random.Random(20260816)
    vals = np.asarray([rng.randrange(0, 1 << 59) for _ in range(size)],
                      dtype=np.int64)
    out = {}

    def run():
        out["roots"] = backend.floor_roots_batch(vals, 4)

    elapsed = _time(run, repeat)
    return elapsed, np.asarray(out["roots"])


def bench_split_sum(backend, size: int, repeat: int):
    x = size * 1000
    R = integer_kth_root(x // 2, 2)
    out = {}

    def run():
        out["total"] = backend.split_sum_batch(x, 2, R)

    elapsed = _time(run, repeat)
    return elapsed, out["total"]


BENCHES = [
    ("accumulate_shifted_range", bench_accumulate),
    ("floor_roots_batch", bench_floor_roots),
    ("split_sum_batch", bench_split_sum),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--size", type=int, default=200_000,
                        help="problem size per kernel (default 200000)")
    parser.add_argument("--repeat", type=int, default=5,
                        help="timing repetitions; best of N (default 5)")
    args = parser.parse_args()

    if _core is None:
        print("compiled backend not importable; timing pure Python only")
    header = f"{'kernel':<28}{'python':>12}{'compiled':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, bench in BENCHES:
        t_py, out_py = bench(_core_py, args.size, args.repeat)
        if _core is None:
            print(f"{name:<28}{t_py * 1e3:>10.2f}ms{'-':>12}{'-':>10}")
            continue
        t_c, out_c = bench(_core, args.size, args.repeat)
        if isinstance(out_py, np.ndarray):
            same = np.array_equal(np.asarray(out_py), np.asarray(out_c))
        else:
            same = out_py == out_c
        if not same:
            raise SystemExit(f"backend outputs differ for {name}")
        print(f"{name:<28}{t_py * 1e3:>10.2f}ms{t_c * 1e3:>10.2f}ms"
              f"{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
