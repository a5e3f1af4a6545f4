"""Time the beat-sum kernel: numba njit loop vs pure-numpy fallback.

The kernel evaluates y(t) = dc + sum_p [a_p cos(w_p t) + b_p sin(w_p t)]
over every time sample; pair counts grow quadratically with Hilbert-space
dimension, so this sum dominates simulate() runtime for big registers.

Run:  python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from spinweave._kernels import (
    HAS_NUMBA,
    beat_signal_numba,
    beat_signal_numpy,
)


def synth_components(n_pairs, rng):
    omega = rng.uniform(0.1, 8.0, n_pairs)  # rad/ps, typical spin-beat range
    c_cos = rng.normal(0.0, 1e-4, n_pairs)
    c_sin = rng.normal(0.0, 1e-4, n_pairs)
    return 0.05, c_cos, c_sin, omega


def best_of(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="timing repeats (best-of)")
    ap.add_argument("--t-max", type=float, default=40.0)
    ap.add_argument("--dt", type=float, default=0.02)
    args = ap.parse_args()

    t = np.arange(0.0, args.t_max + args.dt / 2, args.dt)
    rng = np.random.default_rng(0)

    if not HAS_NUMBA:
        print("numba not importable; only the numpy path will run")

    print(f"{len(t)} time samples, best of {args.repeat}")
    print(f"{'pairs':>8} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>9} {'max|diff|':>11}")
    for n_pairs in (100, 1_000, 10_000, 100_000):
        parts = synth_components(n_pairs, rng)
        y_np = beat_signal_numpy(*parts, t)
        t_np = best_of(beat_signal_numpy, (*parts, t), args.repeat)
        if HAS_NUMBA:
            y_nb = beat_signal_numba(*parts, t)  # first call pays compilation
            t_nb = best_of(beat_signal_numba, (*parts, t), args.repeat)
            dev = np.max(np.abs(y_nb - y_np))
            print(
                f"{n_pairs:>8} {1e3 * t_np:>12.3f} {1e3 * t_nb:>12.3f}"
                f" {t_np / t_nb:>8.2f}x {dev:>11.2e}"
            )
        else:
            print(f"{n_pairs:>8} {1e3 * t_np:>12.3f} {'-':>12} {'-':>9} {'-':>11}")


if __name__ == "__main__":
    main()
