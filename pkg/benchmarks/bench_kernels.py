#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure numpy fallback.

Times the three hot kernels directly, then one end-to-end solve per lane
in a subprocess (lane selection happens at import time).

Usage: python benchmarks/bench_kernels.py [--quick]
"""
import argparse
import os
import subprocess
import sys
import time

import numpy as np

from robustsets._kernels import _fallback

try:
    from robustsets._kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_kernels(quick: bool):
    rng = np.random.default_rng(0)
    T = 20_000 if quick else 200_000
    V = rng.uniform(0.0, 2.0, size=(3, 200))
    n_calls = 200 if quick else 2000
    profits = rng.integers(0, 60, size=12)
    sizes = rng.integers(1, 15, size=12)
    kappa = 256
    contrib = rng.integers(0, 40, size=(8, 8))
    csizes = rng.integers(1, 9, size=8)

    cases = [
        ("mwu_table_loop",
         lambda impl: impl.mwu_table_loop(V, -0.004, T)),
        ("knapsack_min_size_dp",
         lambda impl: [impl.knapsack_min_size_dp(profits, sizes, 70)
                       for _ in range(n_calls)]),
        ("cardinality_min_size_dp",
         lambda impl: [impl.cardinality_min_size_dp(contrib, csizes, 24, kappa)
                       for _ in range(n_calls // 4)]),
    ]
    rows = []
    for name, runner in cases:
        pure = timeit(lambda: runner(_fallback))
        if _core is not None:
            comp = timeit(lambda: runner(_core))
            rows.append((name, comp, pure, pure / comp))
        else:
            rows.append((name, None, pure, None))
    return rows


def bench_end_to_end():
    """One full engine run per lane, in fresh interpreters."""
    script = (
        "import time, numpy as np\n"
        "from robustsets import *\n"
        "from robustsets.mwu import mwu_solve\n"
        "from robustsets.subroutines import BruteForceSubroutine\n"
        "rng = np.random.default_rng(5)\n"
        "g = GroundSet([f'e{i}' for i in range(6)])\n"
        "objs = [LinearObjective(rng.uniform(0.2, 1.0, 6)) for _ in range(3)]\n"
        "inst = ProblemInstance(g, objs, UniformMatroid(6, 2))\n"
        "t0 = time.perf_counter()\n"
        "p, tr = mwu_solve(inst, BruteForceSubroutine(), epsilon=0.2)\n"
        "print(time.perf_counter() - t0)\n"
    )
    out = []
    for pure in ("0", "1"):
        env = dict(os.environ, ROBUSTSETS_PURE=pure)
        res = subprocess.run([sys.executable, "-c", script], env=env,
                             capture_output=True, text=True, check=True)
        out.append(float(res.stdout.strip()))
    return out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    parser.add_argument("--skip-e2e", action="store_true")
    args = parser.parse_args()

    if _core is None:
        print("compiled kernels not built; timing the fallback only\n")
    print(f"{'kernel':<26} {'compiled':>10} {'pure':>10} {'speedup':>9}")
    for name, comp, pure, speedup in bench_kernels(args.quick):
        cs = f"{comp:.4f}s" if comp is not None else "--"
        sp = f"{speedup:.1f}x" if speedup is not None else "--"
        print(f"{name:<26} {cs:>10} {pure:>9.4f}s {sp:>9}")

    if not args.skip_e2e and _core is not None:
        comp, pure = bench_end_to_end()
        print(f"\n{'end-to-end mwu solve':<26} {comp:>9.4f}s {pure:>9.4f}s "
              f"{pure / comp:>8.1f}x")


if __name__ == "__main__":
    main()
