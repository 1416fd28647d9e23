"""Wall-clock comparison of the numba and pure-numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--trials 20000]

Each case runs once untimed (numba compilation), then reports the best of
--repeat runs per backend and the speedup.
"""
import argparse
import time

import numpy as np

from isacnet import SystemConfig, kernels
from isacnet.analytic import coverage_networked
from isacnet.simulator import simulate


def _quad_inputs(rng, n_s=64, n_r=2000):
    r = np.sort(rng.uniform(1, 3000, n_r))
    direct = (rng.exponential(1e3, n_s), r, rng.random(n_r), np.arange(0, n_r, 50),
              rng.random(n_r), rng.random(n_r), r ** -2.0, 0.1 * r ** -4.0, 3.0, 2.0)
    clutter = (rng.exponential(1.0, (64, 16)), rng.random((16, 16, 400)), rng.random(400),
               rng.random(400), np.arange(0, 400, 20), rng.random((16, 16, 20)), 0.7)
    return direct, clutter


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--trials", type=int, default=20000)
    args = ap.parse_args()
    if "numba" not in kernels.available():
        raise SystemExit("numba backend unavailable; nothing to compare")
    cfg = SystemConfig()
    direct, clutter = _quad_inputs(np.random.default_rng(0))
    cases = {
        "direct_suffix": lambda: kernels.direct_suffix(*direct),
        "clutter_reflection_sum": lambda: kernels.clutter_reflection_sum(*clutter),
        f"run_trials ({args.trials} trials, 4 links)":
            lambda: simulate(cfg, args.trials, 1, 4, 20.0),
        "coverage_networked (analytic, N=4)":
            lambda: coverage_networked(20.0, 1.0, 4, cfg),
    }
    print(f"{'case':42s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, fn in cases.items():
        t = {}
        for backend in ("numpy", "numba"):
            with kernels.using(backend):
                t[backend] = best_of(fn, args.repeat)
        print(f"{name:42s} {t['numpy']:10.4f} {t['numba']:10.4f} {t['numpy'] / t['numba']:8.1f}x")


if __name__ == "__main__":
    main()
