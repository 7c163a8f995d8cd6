#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Workloads mirror how the simulator drives each kernel: scalar calls in a
session-step loop, batch calls for Monte Carlo workspace sampling.
"""

import argparse
import math
import time

import numpy as np

from pantosim import _kernels_py as pure

try:
    from pantosim import _kernels as compiled
except ImportError:
    compiled = None


def timeit(fn, repeat):
    best = math.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_fk(mod, n=20000):
    rng = np.random.default_rng(1)
    thetas = rng.uniform(-1, 1, n)
    a1s = rng.uniform(-0.5, 0.5, n)
    a2s = rng.uniform(0.6, 2.5, n)

    def work():
        for k in range(n):
            mod.fk_points(0.216, 0.518, 0.225, 0.0, 0.0, 1.0, thetas[k], a1s[k], a2s[k])

    return work


def bench_ik(mod, n=50000):
    rng = np.random.default_rng(2)
    pts = rng.uniform(-0.5, 0.5, size=(n, 3))

    def work():
        for k in range(n):
            mod.ik_angles(0.518, 0.225, pts[k, 0], pts[k, 1], pts[k, 2])

    return work


def bench_project(mod, n=5000):
    rng = np.random.default_rng(3)
    normals = rng.normal(size=(4, 3))
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    normals = np.ascontiguousarray(normals)
    offsets = np.ascontiguousarray(rng.uniform(-0.4, 0.0, size=4))
    pts = rng.uniform(-1, 1, size=(n, 3))

    def work():
        for k in range(n):
            mod.project_halfspaces(normals, offsets, pts[k, 0], pts[k, 1], pts[k, 2])

    return work


def bench_heightfield(mod, n=50000):
    rng = np.random.default_rng(4)
    heights = np.ascontiguousarray(rng.uniform(0, 0.05, size=(32, 32)))
    pts = rng.uniform(0.0, 3.1, size=(n, 2))

    def work():
        for k in range(n):
            mod.heightfield_query(0.0, 0.0, 0.1, heights, pts[k, 0], pts[k, 1])

    return work


def bench_actuator(mod, n=2000):
    def work():
        h = 0.98
        for _ in range(n):
            h, _cmd = mod.actuator_advance(h, 1.01, 2.0, 0.016, 0.020, 0.05, 0.001)

    return work


def bench_clamp(mod, n=50000):
    rng = np.random.default_rng(5)
    pts = rng.uniform(-1, 1, size=(n, 3))

    def work():
        for k in range(n):
            mod.clamp_to_sector(
                pts[k, 0], pts[k, 1], pts[k, 2], 0.342, 0.722, 1.047, -0.59, 0.59
            )

    return work


def bench_mc(mod, n=200000):
    rng = np.random.default_rng(6)
    dirs = rng.normal(size=(n, 3))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    dirs = np.ascontiguousarray(dirs)

    def work():
        mod.count_in_sector(dirs, 1.047, -0.59, 0.59)

    return work


def bench_erase(mod, n=5000):
    rng = np.random.default_rng(7)
    cx = np.ascontiguousarray(rng.uniform(-0.3, 0.3, 100))
    cy = np.ascontiguousarray(rng.uniform(-0.15, 0.15, 100))
    pts = rng.uniform(-0.3, 0.3, size=(n, 2))

    def work():
        erased = np.zeros(100, dtype=np.uint8)
        for k in range(n):
            mod.erase_tiles(cx, cy, erased, pts[k, 0], pts[k, 1], 0.01)

    return work


BENCHES = [
    ("fk_points x20k", bench_fk),
    ("ik_angles x50k", bench_ik),
    ("project_halfspaces(4) x5k", bench_project),
    ("heightfield_query x50k", bench_heightfield),
    ("actuator_advance (50ms) x2k", bench_actuator),
    ("clamp_to_sector x50k", bench_clamp),
    ("count_in_sector 200k dirs", bench_mc),
    ("erase_tiles(100) x5k", bench_erase),
]


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if compiled is None:
        print("compiled kernels unavailable; showing pure-python timings only")
    print(f"{'kernel':34} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for name, make in BENCHES:
        t_pure = timeit(make(pure), args.repeat)
        if compiled is not None:
            t_comp = timeit(make(compiled), args.repeat)
            print(
                f"{name:34} {t_pure * 1e3:9.1f}ms {t_comp * 1e3:9.1f}ms "
                f"{t_pure / t_comp:7.1f}x"
            )
        else:
            print(f"{name:34} {t_pure * 1e3:9.1f}ms {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
