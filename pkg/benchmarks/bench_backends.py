"""Timing comparison of the compiled numerical core against the pure-Python
fallback: kernel sums (1-D and 2-D) and map-orbit iteration.

Run:  python3 benchmarks/bench_backends.py
"""

import time

import numpy as np

from dynkde._core import BACKEND_NAME, backend, fallback


def timeit(fn, *args, repeat=5):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    if BACKEND_NAME != "cython":
        print("compiled backend unavailable; benchmarking the fallback "
              "against itself is meaningless")
        return
    rng = np.random.default_rng(0)
    n, p = 200_000, 400
    xs = np.sort(rng.random(n))
    pts = rng.random(p)
    Y = rng.random((n, 1))
    X2 = rng.random((n, 2))
    X2 = X2[np.argsort(X2[:, 0], kind="stable")]
    Y2 = rng.random((n, 2))
    P2 = rng.random((2500, 2))

    cases = [
        ("kernel_sums_1d (epanechnikov)",
         lambda b: b.kernel_sums_1d(xs, pts, 0.005, 1.0, 1)),
        ("kernel_weighted_sums_1d",
         lambda b: b.kernel_weighted_sums_1d(xs, Y, pts, 0.005, 1.0, 1)),
        ("kernel_sums_2d (box)",
         lambda b: b.kernel_sums_2d(X2, P2, 0.01, 1.0, 0)),
        ("kernel_weighted_sums_2d",
         lambda b: b.kernel_weighted_sums_2d(X2, Y2, P2, 0.01, 1.0, 0)),
        ("orbit_beta n=10^6",
         lambda b: b.orbit_beta(0.371, 1_000_000, 27 / 11, 0.0)),
        ("orbit_logistic n=10^6",
         lambda b: b.orbit_logistic(0.371, 1_000_000, 3.8)),
        ("orbit_matrix2 n=10^6",
         lambda b: b.orbit_matrix2(0.3, 0.4, 1_000_000, 2.5, 3.4, 4.6, 3.2)),
    ]

    print(f"{'case':36s} {'compiled':>10s} {'python':>10s} {'speedup':>8s}")
    for name, fn in cases:
        tc = timeit(fn, backend)
        tp = timeit(fn, fallback, repeat=2)
        print(f"{name:36s} {tc * 1e3:9.2f}ms {tp * 1e3:9.2f}ms "
              f"{tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
