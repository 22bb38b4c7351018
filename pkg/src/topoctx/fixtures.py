"""Deterministic test scenes: bars with gaps, a curve rendered at two
widths to provoke tiling artifacts, and seeded random masks."""

from __future__ import annotations

import numpy as np

from . import _kernels
from .core import Grid

__all__ = ["gen_gap_line", "gen_tiling_artifact", "gen_random"]


def _centered_span(extent: int, size: int) -> slice:
    start = (extent - size) // 2
    return slice(start, start + size)


def gen_gap_line(
    shape: tuple[int, ...],
    length: int,
    thickness: int = 1,
    gap_at: int | None = None,
    gap_width: int = 1,
) -> tuple[Grid, Grid]:
    """A centered bar along the last axis, intact and with a gap.

    Returns (target, broken): `target` is the full bar, `broken` the same
    bar with `gap_width` cells removed starting `gap_at` cells into it
    (`gap_width=0` leaves them identical). `thickness` applies to every
    non-last axis. `gap_at=None` centers the gap.
    """
    if len(shape) not in (2, 3):
        raise ValueError(f"shape must be 2D or 3D, got {shape}")
    if any(s <= 0 for s in shape):
        raise ValueError(f"extents must be positive, got {shape}")
    if not 1 <= length <= shape[-1]:
        raise ValueError(f"length must be in 1..{shape[-1]}, got {length}")
    if not 1 <= thickness <= min(shape[:-1]):
        raise ValueError(
            f"thickness must be in 1..{min(shape[:-1])}, got {thickness}"
        )
    if gap_width < 0:
        raise ValueError(f"gap_width must be nonnegative, got {gap_width}")
    if gap_at is None:
        gap_at = (length - gap_width) // 2
    if gap_at < 0 or gap_at + gap_width > length:
        raise ValueError(
            f"gap [{gap_at}, {gap_at + gap_width}) falls outside the bar "
            f"of length {length}"
        )
    bar = np.zeros(shape, dtype=np.uint8)
    span = tuple(_centered_span(s, thickness) for s in shape[:-1])
    line = _centered_span(shape[-1], length)
    bar[span + (line,)] = 1
    broken = bar.copy()
    gap = slice(line.start + gap_at, line.start + gap_at + gap_width)
    broken[span + (gap,)] = 0
    return Grid.binary(bar), Grid.binary(broken)


def _bresenham(p0: tuple[int, int], p1: tuple[int, int]):
    # integer line rasterization, endpoints included
    r0, c0 = p0
    r1, c1 = p1
    dr = abs(r1 - r0)
    dc = abs(c1 - c0)
    sr = 1 if r1 >= r0 else -1
    sc = 1 if c1 >= c0 else -1
    err = dc - dr
    r, c = r0, c0
    while True:
        yield r, c
        if r == r1 and c == c1:
            return
        e2 = 2 * err
        if e2 > -dr:
            err -= dr
            c += sc
        if e2 < dc:
            err += dc
            r += sr
    # unreachable


def _render_curve(
    shape: tuple[int, int], curve: list[tuple[int, int]], width: int
) -> np.ndarray:
    mask = np.zeros(shape, dtype=np.uint8)
    for p0, p1 in zip(curve, curve[1:]):
        for r, c in _bresenham(p0, p1):
            mask[r, c] = 1
    rounds = (width - 1) // 2
    if rounds:
        field = mask.astype(np.float32)
        for _ in range(rounds):
            field = _kernels.dilate(field)
        mask = (field > 0).astype(np.uint8)
    return mask


def gen_tiling_artifact(
    shape: tuple[int, int] = (16, 16),
    tile: tuple[int, int] = (8, 8),
    thin: int = 1,
    thick: int = 3,
    curve: list[tuple[int, int]] | None = None,
) -> tuple[Grid, Grid, Grid]:
    """One curve rendered at two widths against a tiled evaluation.

    Returns (target, pred_thin, pred_thick). The target and the thin
    prediction are the same curve at width `thin`; the thick prediction
    widens it so it crosses the tile boundary below the default curve,
    which fragments into extra per-tile components while whole-image
    component counts, reference-skeleton coverage, and masked component
    counts all stay unchanged.
    """
    if len(shape) != 2 or any(s <= 0 for s in shape):
        raise ValueError(f"shape must be a positive 2D extent, got {shape}")
    if len(tile) != 2 or any(t <= 0 for t in tile):
        raise ValueError(f"tile must be a positive 2D extent, got {tile}")
    if thin < 1 or thick < 1 or thin % 2 == 0 or thick % 2 == 0:
        raise ValueError(
            f"widths must be odd and positive, got thin={thin} thick={thick}"
        )
    if thin >= thick:
        raise ValueError(f"thin width must be below thick, got {thin} >= {thick}")
    if curve is None:
        row = tile[0] - 1
        if row >= shape[0]:
            raise ValueError("tile is taller than the grid")
        curve = [(row, 0), (row, shape[1] - 1)]
    pts = [(int(r), int(c)) for r, c in curve]
    if len(pts) < 2:
        raise ValueError("curve needs at least two points")
    for r, c in pts:
        if not (0 <= r < shape[0] and 0 <= c < shape[1]):
            raise ValueError(f"curve point ({r}, {c}) outside {shape}")
    target = _render_curve(shape, pts, thin)
    pred_thick = _render_curve(shape, pts, thick)
    return Grid.binary(target), Grid.binary(target.copy()), Grid.binary(pred_thick)


def gen_random(
    shape: tuple[int, ...], density: float = 0.5, seed: int = 0
) -> Grid:
    """Seeded random binary grid; cell probability `density`."""
    if len(shape) not in (2, 3) or any(s <= 0 for s in shape):
        raise ValueError(f"shape must be a positive 2D/3D extent, got {shape}")
    if not 0.0 <= density <= 1.0:
        raise ValueError(f"density must be in [0, 1], got {density}")
    rng = np.random.Generator(np.random.PCG64(seed))
    return Grid.binary((rng.random(shape) < density).astype(np.uint8))
