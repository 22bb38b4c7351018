"""Shared test setup.

Compiles every jitted kernel signature once per session (when the numba
backend is active) so individual tests measure steady-state runtime, and
provides a seeded generator helper used by the randomized loops.
"""

from __future__ import annotations

import numpy as np
import pytest

from topoctx import Grid, active_backend, distance_transform_sq, soft_dilate, soft_erode
from topoctx.topology import euler_characteristic, label_components


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_binary(rng: np.random.Generator, shape, density: float = 0.5) -> Grid:
    return Grid.binary((rng.random(shape) < density).astype(np.uint8))


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    if active_backend() != "numba":
        return
    for shape in ((4, 4), (3, 3, 3)):
        g = Grid.real(np.ones(shape, dtype=np.float32))
        soft_erode(g)
        soft_dilate(g)
        m = Grid.binary(np.ones(shape, dtype=np.uint8))
        distance_transform_sq(m)
        label_components(m)
        label_components(m, connectivity="background")
        euler_characteristic(m)
