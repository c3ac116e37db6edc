"""Time the numba kernels against the pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run once untimed (so numba compilation and caching are
excluded), then ``--repeat`` times; the best wall time is reported.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from rsl import combinatorial_oracle as co
from rsl import kernels
from rsl.monte_carlo import Field, sample_rng, sample_weight_matrix


def best_of(fn, repeat: int) -> float:
    fn()
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def cases():
    perms = co.all_permutations(8)
    edges = co._constraint_edges(perms)
    tau_inv = (np.arange(9) - 1) % 9
    comm_input = tau_inv[co.full_cycles(9)]
    batch, n, t_max = 128, 64, 32
    W = np.stack([sample_weight_matrix(n, Field.COMPLEX, sample_rng(0, i)) for i in range(batch)])
    X = sample_rng(1, 0).standard_normal((batch, t_max + 1, n))
    return {
        "cycle_counts (8! perms)": lambda k: k.cycle_counts(comm_input),
        "class_counts (8! pairings)": lambda k: k.class_counts(edges, 16),
        "log_product_prefix (n=1e6, m=1e5)": lambda k: k.log_product_prefix(10**6, 10**5),
        "recurrence_energies (128 x n=64, t=32, lru)": lambda k: k.recurrence_energies(W, X, t_max, True),
    }


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if kernels.numba_kernels is None:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':46s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for name, call in cases().items():
        t_np = best_of(lambda: call(kernels.numpy_kernels), args.repeat)
        t_nb = best_of(lambda: call(kernels.numba_kernels), args.repeat)
        print(f"{name:46s} {t_np:10.4f} {t_nb:10.4f} {t_np / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
