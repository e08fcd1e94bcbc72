"""Time the numba and pure-numpy kernel paths side by side.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import math
from timeit import default_timer as timer

import numpy as np

from bellphase import _accel, kernels
from bellphase.bell import _STARTS


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = timer()
        fn()
        times.append(timer() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    phis = np.linspace(0.0, math.pi, 50)
    means = np.tile([3.0, 25.0, 250.0, 2.5e4], 25_000)

    cases = {
        "maximizer (50 phases x 16 starts)":
            lambda nb: [kernels.chsh_coordinate_ascent(p, _STARTS, 1e-10, 10_000, nb) for p in phis],
        "poisson (100k draws)":
            lambda nb: kernels.poisson_draws(means, 12345, nb),
    }
    paths = [False] + ([True] if _accel.HAVE_NUMBA else [])
    print(f"{'kernel':36s} {'numpy [s]':>10s} {'numba [s]':>10s} {'speedup':>8s}")
    for name, fn in cases.items():
        for nb in paths:
            fn(nb)  # compile / warm caches
        t = {nb: best_of(lambda: fn(nb), args.repeat) for nb in paths}
        if True in t:
            print(f"{name:36s} {t[False]:10.4f} {t[True]:10.4f} {t[False] / t[True]:8.1f}")
        else:
            print(f"{name:36s} {t[False]:10.4f} {'n/a':>10s}")
    if _accel.HAVE_NUMBA:
        a = kernels.poisson_draws(means, 12345, True)
        b = kernels.poisson_draws(means, 12345, False)
        print("poisson paths identical:", bool(np.array_equal(a, b)))


if __name__ == "__main__":
    main()
