"""Soft morphology and exact distance transforms.

The soft operators are the min/max pooling pair: erosion takes the minimum
over the axis cross (2*ndim+1 cells), dilation the maximum over the full
3^ndim box, and cells outside the grid contribute zero to both. Iterating
``relu(g - open(g))`` accumulation extracts a one-cell-wide core from a
[0, 1] field; thresholding that core gives the binary variant.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import _kernels
from ._kernels import INF_SQDIST
from .core import Grid, GridError

__all__ = [
    "DistanceField",
    "INF_SQDIST",
    "soft_erode",
    "soft_dilate",
    "soft_open",
    "soft_skeleton",
    "hard_skeleton",
    "distance_transform_sq",
]


@dataclasses.dataclass(frozen=True, eq=False)
class DistanceField:
    """Exact squared Euclidean distances (int64, cell units) to a seed set.

    Cells with no reachable seed hold INF_SQDIST. Written to disk as
    float32 with INF mapped to the largest finite float32.
    """

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data)
        if arr.ndim not in (2, 3):
            raise GridError(f"distance field must be 2D or 3D, got {arr.ndim}D")
        if arr.dtype != np.int64:
            raise GridError(f"distance field dtype must be int64, got {arr.dtype}")
        if not arr.flags.c_contiguous:
            arr = np.ascontiguousarray(arr)
            arr.flags.writeable = False
        elif arr.flags.writeable:
            arr = arr.copy()
            arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def to_real_grid(self) -> Grid:
        out = self.data.astype(np.float32)
        out[self.data == INF_SQDIST] = np.finfo(np.float32).max
        return Grid._wrap(out)


def _as_field(grid: Grid) -> np.ndarray:
    if grid.is_binary:
        return grid.data.astype(np.float32)
    return grid.data


def soft_erode(grid: Grid) -> Grid:
    """Axis-cross minimum; the grid boundary erodes (outside reads zero)."""
    return Grid._wrap(_kernels.erode(_as_field(grid)))


def soft_dilate(grid: Grid) -> Grid:
    """Full-box maximum; outside the grid reads zero."""
    return Grid._wrap(_kernels.dilate(_as_field(grid)))


def soft_open(grid: Grid) -> Grid:
    """Erosion followed by dilation; removes structure thinner than the cross."""
    return Grid._wrap(_kernels.dilate(_kernels.erode(_as_field(grid))))


def _check_iters(iters: int) -> None:
    if not isinstance(iters, (int, np.integer)) or isinstance(iters, bool):
        raise TypeError(f"iters must be an int, got {type(iters).__name__}")
    if iters < 1:
        raise ValueError(f"iters must be positive, got {iters}")


def _skeleton_field(field: np.ndarray, iters: int) -> np.ndarray:
    g = field
    skel = np.maximum(g - _kernels.dilate(_kernels.erode(g)), np.float32(0.0))
    for _ in range(iters):
        g = _kernels.erode(g)
        if not g.any():
            # every remaining round would add relu(0 - open(0)) = 0
            break
        delta = np.maximum(g - _kernels.dilate(_kernels.erode(g)), np.float32(0.0))
        skel = skel + np.maximum(delta - skel * delta, np.float32(0.0))
    return skel


def soft_skeleton(grid: Grid, iters: int = 50) -> Grid:
    """Differentiable one-cell-wide core of a [0, 1] field.

    `iters` bounds the structure half-width that can be fully thinned;
    output values stay in [0, 1], and a binary input yields an exactly
    binary-valued real field.
    """
    _check_iters(iters)
    grid.require_probability("soft_skeleton input")
    return Grid._wrap(_skeleton_field(_as_field(grid), iters))


def hard_skeleton(mask: Grid, iters: int = 50) -> Grid:
    """Binary core of a binary mask: soft skeleton of the 0/1 field,
    kept where positive. The result is a subset of the input."""
    _check_iters(iters)
    mask.require_binary("hard_skeleton input")
    skel = _skeleton_field(mask.data.astype(np.float32), iters)
    return Grid._wrap((skel > 0.0).astype(np.uint8))


def distance_transform_sq(seeds: Grid) -> DistanceField:
    """Exact squared Euclidean distance to the nonzero cells of a binary
    grid; INF_SQDIST everywhere when the grid is empty."""
    seeds.require_binary("distance_transform_sq input")
    arr = _kernels.sqdist_from_seeds(seeds.data)
    arr.flags.writeable = False
    return DistanceField(arr)
