"""Compare the compiled (numba) and pure-numpy kernel paths.

Run with the default environment to benchmark the compiled path against the
uncompiled reference, or with QRABI_DISABLE_NUMBA=1 to confirm both columns
collapse to the numpy timing.

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from qrabi import kernels


def timeit(func, *args, repeat: int = 5, number: int = 20) -> float:
    """Best-of-repeat mean call time in seconds."""
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        for _ in range(number):
            func(*args)
        best = min(best, (time.perf_counter() - t0) / number)
    return best


def bench_oscillator_table():
    x = np.linspace(-40.0, 40.0, 4001)
    n_max = 600
    # warm-up triggers JIT compilation so it is not counted
    kernels.oscillator_table(n_max, x)
    fast = timeit(kernels.oscillator_table, n_max, x)
    ref = timeit(kernels.oscillator_table_numpy, n_max, x)
    return "oscillator_table(n=600, 4001 pts)", fast, ref


def bench_pp_energy():
    rng = np.random.default_rng(7)
    draws = [
        (
            rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9),
            rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
            rng.uniform(0.2, 3.0), rng.uniform(0.2, 3.0),
            0.1, 1.0, rng.uniform(0.5, 3.0),
        )
        for _ in range(2000)
    ]
    kernels.pp_energy(*draws[0])

    def run_fast():
        for d in draws:
            kernels.pp_energy(*d)

    def run_ref():
        for d in draws:
            kernels.pp_energy_numpy(*d)

    fast = timeit(run_fast, number=3)
    ref = timeit(run_ref, number=3)
    return "pp_energy (2000 evaluations)", fast, ref


def main():
    backend = "numba" if kernels.using_numba() else "numpy (fallback)"
    print(f"active backend: {backend}\n")
    print(f"{'kernel':<36} {'active':>12} {'numpy ref':>12} {'speedup':>9}")
    for bench in (bench_oscillator_table, bench_pp_energy):
        name, fast, ref = bench()
        print(f"{name:<36} {fast * 1e3:>10.3f}ms {ref * 1e3:>10.3f}ms {ref / fast:>8.1f}x")


if __name__ == "__main__":
    main()
