"""Kernel timings: jitted backend vs the pure-numpy fallback.

Run directly: python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from topoctx import (
    Grid,
    distance_transform_sq,
    hard_skeleton,
    set_backend,
    soft_skeleton,
)
from topoctx._backend import HAVE_NUMBA
from topoctx.topology import euler_characteristic, label_components

rng = np.random.Generator(np.random.PCG64(0))

edt_seeds = Grid.binary((rng.random((1024, 1024)) < 0.5).astype(np.uint8))
skel_field = Grid.real(np.ones((512, 512), dtype=np.float32))
label_mask = Grid.binary((rng.random((64, 64, 64)) < 0.5).astype(np.uint8))
euler_mask = Grid.binary((rng.random((1024, 1024)) < 0.5).astype(np.uint8))

CASES = [
    ("sqdist 1024x1024", lambda: distance_transform_sq(edt_seeds)),
    ("skeleton 512x512 x50", lambda: soft_skeleton(skel_field, 50)),
    ("label 64^3 full-adj", lambda: label_components(label_mask)),
    ("euler 1024x1024", lambda: euler_characteristic(euler_mask)),
]


def best_of(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def run_backend(name):
    set_backend(name)
    if name == "numba":
        # compile every signature before timing
        warm = Grid.binary(np.ones((4, 4), dtype=np.uint8))
        distance_transform_sq(warm)
        hard_skeleton(warm, 2)
        label_components(warm)
        euler_characteristic(warm)
        warm3 = Grid.binary(np.ones((3, 3, 3), dtype=np.uint8))
        distance_transform_sq(warm3)
        hard_skeleton(warm3, 2)
        label_components(warm3)
        euler_characteristic(warm3)
    return {label: best_of(fn) for label, fn in CASES}


def main():
    if not HAVE_NUMBA:
        print("numba is not installed; only the numpy fallback can run")
        times = run_backend("numpy")
        for label, t in times.items():
            print(f"{label:<24} {t * 1e3:10.2f} ms")
        return

    jit = run_backend("numba")
    plain = run_backend("numpy")
    print(f"{'kernel':<24} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for label, _ in CASES:
        ratio = plain[label] / jit[label]
        print(
            f"{label:<24} {jit[label] * 1e3:10.2f} ms "
            f"{plain[label] * 1e3:10.2f} ms {ratio:8.1f}x"
        )


if __name__ == "__main__":
    main()
