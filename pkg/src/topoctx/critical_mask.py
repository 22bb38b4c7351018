"""Critical-pixel mask extraction.

A prediction and its reference disagree in two topologically meaningful
ways: connections the prediction misses (its binarization fails to cover
part of the reference skeleton) and spurious connections it invents (its
own skeleton leaves the reference). For each error the mask keeps the
cells that sit closer to the offending skeleton fragment than to the
retained fragment, cropped to the reference (for misses) or to the
binarized prediction (for false positives). The union of both regions is
the context on which losses get reweighted.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .core import Grid, GridError, LossConfig, binarize
from .morphology import distance_transform_sq, hard_skeleton, soft_skeleton

__all__ = ["CriticalMask", "split_skeleton", "context_region", "critical_mask"]

MODES = ("soft", "binary")


@dataclasses.dataclass(frozen=True, eq=False)
class CriticalMask:
    """Binary context regions: missed connections (`gap`), spurious
    connections (`false_positive`), and their union (`mask`)."""

    gap: Grid
    false_positive: Grid
    mask: Grid


def split_skeleton(skeleton: Grid, cover: Grid) -> tuple[Grid, Grid]:
    """Split a binary skeleton by a covering mask.

    Returns (uncovered, covered): the cells of the skeleton outside and
    inside the cover. Their union is the skeleton, the intersection empty.
    """
    skeleton.require_binary("skeleton")
    cover.require_binary("cover")
    if skeleton.shape != cover.shape:
        raise GridError(
            f"shapes differ: skeleton {skeleton.shape} vs cover {cover.shape}"
        )
    s = skeleton.to_bool()
    c = cover.to_bool()
    uncovered = Grid._wrap((s & ~c).astype(np.uint8))
    covered = Grid._wrap((s & c).astype(np.uint8))
    return uncovered, covered


def context_region(err_part: Grid, keep_part: Grid, crop: Grid) -> Grid:
    """Cells of `crop` strictly closer to the error fragment than to the
    kept fragment (exact squared distances; ties stay out).

    Degenerate splits resolve through the INF distance sentinel: an empty
    error fragment yields an empty region, and an empty kept fragment
    (with a nonempty error) yields the whole crop region.
    """
    err_part.require_binary("error fragment")
    keep_part.require_binary("kept fragment")
    crop.require_binary("crop region")
    if not err_part.shape == keep_part.shape == crop.shape:
        raise GridError(
            f"shapes differ: {err_part.shape}, {keep_part.shape}, {crop.shape}"
        )
    if err_part.count == 0:
        # no error cells: every comparison against INF fails
        return Grid._wrap(np.zeros(crop.shape, dtype=np.uint8))
    d_err = distance_transform_sq(err_part).data
    d_keep = distance_transform_sq(keep_part).data
    region = (d_keep > d_err) & crop.to_bool()
    return Grid._wrap(region.astype(np.uint8))


def critical_mask(
    pred: Grid,
    target: Grid,
    config: LossConfig | None = None,
    mode: str = "soft",
) -> CriticalMask:
    """Extract the critical-pixel regions of a prediction.

    `pred` is a probability grid (binary accepted), `target` a binary
    reference. `mode` picks the prediction skeleton: "soft" thins the raw
    probabilities and thresholds the result at 0.5, "binary" thins the
    binarized prediction. The reference skeleton is always binary.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    cfg = config if config is not None else LossConfig()
    pred.require_probability("prediction")
    target.require_binary("target")
    if pred.shape != target.shape:
        raise GridError(
            f"shapes differ: prediction {pred.shape} vs target {target.shape}"
        )
    x_bin = binarize(pred)

    ref_skel = hard_skeleton(target, cfg.skeleton_iters)
    gap_err, gap_keep = split_skeleton(ref_skel, x_bin)
    gap = context_region(gap_err, gap_keep, crop=target)

    if mode == "soft":
        pred_skel = binarize(soft_skeleton(pred, cfg.skeleton_iters))
    else:
        pred_skel = hard_skeleton(x_bin, cfg.skeleton_iters)
    fp_err, fp_keep = split_skeleton(pred_skel, target)
    false_positive = context_region(fp_err, fp_keep, crop=x_bin)

    union = Grid._wrap(
        (gap.to_bool() | false_positive.to_bool()).astype(np.uint8)
    )
    return CriticalMask(gap=gap, false_positive=false_positive, mask=union)
