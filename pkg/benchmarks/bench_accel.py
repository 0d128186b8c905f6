"""Timing comparison between the compiled and numpy kernel backends.

Runs the three hot kernels on solver-sized arrays and reports per-call
times plus the speedup, then times a full nonlinear solver step through
the public API for context.  Usage:

    python3 benchmarks/bench_accel.py [--size 4096] [--repeats 200]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dampedwave import _accel_py

try:
    from dampedwave import _accel
except ImportError:
    _accel = None


def _time(fn, repeats: int) -> float:
    fn()  # warm up
    best = float("inf")
    for _ in range(max(3, repeats // 50)):
        t0 = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def bench_kernels(size: int, repeats: int) -> None:
    rng = np.random.default_rng(7)
    xi2 = np.linspace(0.0, 40.0, size)
    # make sure every branch is exercised, including the series window
    xi2[size // 2] = 0.25
    xi2[size // 2 + 1] = 0.25 - 5e-5
    uhat = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    vhat = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    nl = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    u = rng.standard_normal(size)
    kh, kp = _accel_py.khat_kprime(0.02, xi2)

    cases = [
        ("khat_kprime", lambda m: (lambda: m.khat_kprime(0.02, xi2))),
        ("abs_pow(p=2.5)", lambda m: (lambda: m.abs_pow(u, 2.5))),
        (
            "predict_combine",
            lambda m: (lambda: m.predict_combine(uhat, vhat, nl, kh, kp, xi2, 0.01)),
        ),
        (
            "correct_combine",
            lambda m: (lambda: m.correct_combine(vhat, nl, nl, kp, 0.01)),
        ),
    ]
    print(f"array size {size}, best of several x{repeats} batches")
    print(f"{'kernel':<18} {'numpy':>12} {'compiled':>12} {'speedup':>9}")
    for name, make in cases:
        t_py = _time(make(_accel_py), repeats)
        if _accel is None:
            print(f"{name:<18} {t_py * 1e6:>10.2f}us {'n/a':>12}")
            continue
        t_cy = _time(make(_accel), repeats)
        print(
            f"{name:<18} {t_py * 1e6:>10.2f}us {t_cy * 1e6:>10.2f}us "
            f"{t_py / t_cy:>8.2f}x"
        )


def bench_step(size: int) -> None:
    from dampedwave.grid import Grid
    from dampedwave.profiles import assemble_pair, power_profile
    from dampedwave.solver import SimConfig, initial_state, step

    grid = Grid(1, size, max(size / 8.0, 16.0))
    pair = assemble_pair(power_profile(grid, 0.25), 0.05)
    config = SimConfig(data=pair, p=2.0, dt=0.02, t_max=1.0)
    state = initial_state(config)
    t0 = time.perf_counter()
    n = 500
    for _ in range(n):
        state = step(state, config.dt, config.p)
    dt = (time.perf_counter() - t0) / n
    from dampedwave.accel import BACKEND

    print(f"\nfull solver step ({BACKEND} backend): {dt * 1e6:.1f}us")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--size", type=int, default=4096)
    ap.add_argument("--repeats", type=int, default=200)
    args = ap.parse_args()
    if _accel is None:
        print("compiled backend not importable; timing numpy only")
    bench_kernels(args.size, args.repeats)
    bench_step(args.size)


if __name__ == "__main__":
    main()
