"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import math
import timeit

import numpy as np

from mubverify import _backend
from mubverify.device import NoiseChannel, _cdf, build_device, outcome_table
from mubverify.experiment import analysis_grid
from mubverify.mub import build_mub, build_strategy


def workloads():
    strategy = build_strategy(build_mub(3))
    device = build_device(3, None, NoiseChannel.white())
    cdf, last = _cdf(outcome_table(device, strategy))
    rng = np.random.default_rng(0)
    u = rng.random((1_000_000, 2))

    # epsilon(N) for one 5000-copy trial, and for 100 of them at once
    n = analysis_grid(5000).astype(float)
    m = np.floor(0.9568 * n)
    c = math.log(20) / n
    n100, m100, c100 = (np.tile(a, 100) for a in (n, m, c))

    x = rng.random(1_000_000)
    y = rng.uniform(1e-6, 1 - 1e-6, 1_000_000)
    scalar_x, scalar_c = np.array([0.9568]), np.array([math.log(20) / 1190])
    return {
        "sample 1e6 copies": lambda k: k.sample_outcomes(u, cdf, last),
        "kl 1e6 pairs": lambda k: k.kl_divergence(x, y),
        "solve eps, 1 trial grid": lambda k: k.solve_y(m / n, c, 1e-15, 200),
        "solve eps, 100 trials": lambda k: k.solve_y(m100 / n100, c100, 1e-15, 200),
        "solve eps, scalar x1000": lambda k: [k.solve_y(scalar_x, scalar_c, 1e-15, 200) for _ in range(1000)],
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = _backend.available()
    names = sorted(backends)
    print(f"{'workload':28s}" + "".join(f"{n:>14s}" for n in names) + "   speedup")
    for label, fn in workloads().items():
        best = {}
        for name in names:
            kernels = backends[name]
            fn(kernels)  # warm up
            best[name] = min(timeit.repeat(lambda: fn(kernels), number=1, repeat=args.repeat))
        cells = "".join(f"{best[n] * 1e3:11.2f} ms" for n in names)
        speedup = best["python"] / best["cython"] if "cython" in best else float("nan")
        print(f"{label:28s}{cells}   {speedup:6.1f}x")


if __name__ == "__main__":
    main()
