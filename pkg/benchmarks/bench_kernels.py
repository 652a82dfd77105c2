"""Time each hot kernel under the numba and pure-numpy backends.

    python3 benchmarks/bench_kernels.py [--repeat N] [--size N]

Both kernel tables are called directly, so the AGCVG_DISABLE_NUMBA flag does
not matter here. Numba timings exclude the first (compiling) call.
"""
import argparse
import time

import numpy as np

from agcvg import kernels


def _inputs(size, rng):
    free = rng.random((size, size)) > 0.15
    free[0, 0] = True
    n_cells = 8
    trans = rng.uniform(1, 20, (4 * n_cells, 4 * n_cells))
    n2 = 40
    trans2 = rng.uniform(1, 20, (4 * n2, 4 * n2))
    exits = np.tile(np.array([3, 2, 1, 0], dtype=np.int64), n2)
    seq2 = np.arange(n2, dtype=np.int64) * 4
    a = rng.uniform(0, size, (1500, 2))
    b = rng.uniform(0, size, (1500, 2))
    targets = np.flatnonzero(free.ravel())[:: max(1, free.sum() // 40)].astype(np.int64)
    adj = rng.random((120, 120)) < 0.05
    path = np.cumsum(rng.uniform(-1, 1, (400, 2)), axis=0) + size / 2
    return {
        "grid_dijkstra": (free, np.int64(0), np.int64(-1), 1.0),
        "grid_distance_matrix": (free, targets[:10], targets, 1.0),
        "hungarian": (rng.uniform(0, 100, (60, 60)),),
        "max_matching": (adj,),
        "max_min_dist": (a, b),
        "swath_mask": (path, 1.5, 1.0, size, size),
        "held_karp": (trans, n_cells),
        "two_opt": (seq2, trans2, exits, 50),
    }


def _time(fn, args, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--size", type=int, default=100, help="grid side for the grid kernels")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    inputs = _inputs(args.size, rng)

    print(f"{'kernel':22s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>9s}")
    for name, fn_args in inputs.items():
        nb = kernels.NUMBA_KERNELS[name]
        nb(*fn_args)                                  # compile
        t_nb = _time(nb, fn_args, args.repeat)
        t_np = _time(kernels.NUMPY_KERNELS[name], fn_args, args.repeat)
        print(f"{name:22s} {t_np * 1e3:12.2f} {t_nb * 1e3:12.2f} {t_np / t_nb:8.1f}x")


if __name__ == "__main__":
    main()
