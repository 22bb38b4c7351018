"""Overlap and cross-entropy losses with optional cell masks, their
context-weighted combination, and finite-difference gradients for checks.

All reductions accumulate in float64 regardless of grid storage. A mask
restricts every sum and mean to its nonzero cells; an empty mask yields 0
for both losses (the smoothing term cancels in the overlap ratio and an
empty mean is defined as 0 rather than NaN).
"""

from __future__ import annotations

import dataclasses
from typing import Mapping

import numpy as np

from .core import Grid, GridError, LossConfig
from .critical_mask import CriticalMask, critical_mask

__all__ = [
    "LossValue",
    "dice_loss",
    "ce_loss",
    "pixel_loss",
    "context_loss",
    "fd_gradient",
]

FD_GRID_LIMIT = 64
FD_TARGETS = ("dice", "ce", "pixel", "context")


@dataclasses.dataclass(frozen=True)
class LossValue:
    """Scalar loss plus the named parts it was mixed from."""

    total: float
    parts: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "parts", dict(self.parts))


def _prep(pred: Grid, target: Grid, mask: Grid | None):
    pred.require_probability("prediction")
    target.require_binary("target")
    shapes = {pred.shape, target.shape}
    if mask is not None:
        mask.require_binary("mask")
        shapes.add(mask.shape)
    if len(shapes) > 1:
        raise GridError(f"grid shapes differ: {sorted(shapes)}")
    p = pred.data.astype(np.float64).ravel()
    g = target.data.astype(np.float64).ravel()
    if mask is not None:
        keep = mask.to_bool().ravel()
        p = p[keep]
        g = g[keep]
    return p, g


def dice_loss(
    pred: Grid,
    target: Grid,
    mask: Grid | None = None,
    *,
    smooth: float = 1e-5,
) -> float:
    """One minus the smoothed overlap ratio over the masked cells."""
    p, g = _prep(pred, target, mask)
    inter = float(np.dot(p, g))
    denom = float(p.sum()) + float(g.sum()) + smooth
    return 1.0 - (2.0 * inter + smooth) / denom


def ce_loss(
    pred: Grid,
    target: Grid,
    mask: Grid | None = None,
    *,
    clamp: float = 1e-7,
) -> float:
    """Mean binary cross-entropy over the masked cells, with predictions
    clamped to [clamp, 1-clamp] before the logs."""
    p, g = _prep(pred, target, mask)
    if p.size == 0:
        return 0.0
    ph = np.clip(p, clamp, 1.0 - clamp)
    terms = g * np.log(ph) + (1.0 - g) * np.log(1.0 - ph)
    return float(-terms.mean())


def pixel_loss(
    pred: Grid,
    target: Grid,
    config: LossConfig | None = None,
    mask: Grid | None = None,
) -> LossValue:
    """Fixed blend of overlap and cross-entropy losses:
    (1 - alpha) * dice + alpha * ce."""
    cfg = config if config is not None else LossConfig()
    d = dice_loss(pred, target, mask, smooth=cfg.smooth)
    c = ce_loss(pred, target, mask, clamp=cfg.clamp)
    total = (1.0 - cfg.alpha) * d + cfg.alpha * c
    return LossValue(total=total, parts={"dice": d, "ce": c})


def context_loss(
    pred: Grid,
    target: Grid,
    config: LossConfig | None = None,
    *,
    return_mask: bool = False,
):
    """Context-weighted objective: the whole-grid pixel loss blended with
    the same loss restricted to the critical-pixel mask,
    (1 - gamma) * whole + gamma * masked.

    A grid with no critical cells contributes a masked term of exactly 0,
    so a perfect prediction scores 0. With ``return_mask=True`` the
    extracted :class:`CriticalMask` is returned alongside the value.
    """
    cfg = config if config is not None else LossConfig()
    cm = critical_mask(pred, target, cfg, mode="soft")
    base = pixel_loss(pred, target, cfg)
    masked = pixel_loss(pred, target, cfg, mask=cm.mask)
    total = (1.0 - cfg.gamma) * base.total + cfg.gamma * masked.total
    value = LossValue(
        total=total,
        parts={
            "dice": base.parts["dice"],
            "ce": base.parts["ce"],
            "masked_dice": masked.parts["dice"],
            "masked_ce": masked.parts["ce"],
        },
    )
    if return_mask:
        return value, cm
    return value


def _loss_fn(which: str, cfg: LossConfig, mask: Grid | None):
    if which == "dice":
        return lambda p, g: dice_loss(p, g, mask, smooth=cfg.smooth)
    if which == "ce":
        return lambda p, g: ce_loss(p, g, mask, clamp=cfg.clamp)
    if which == "pixel":
        return lambda p, g: pixel_loss(p, g, cfg, mask).total
    if which == "context":
        if mask is not None:
            raise ValueError("context loss derives its own mask")
        return lambda p, g: context_loss(p, g, cfg).total
    raise ValueError(f"which must be one of {FD_TARGETS}, got {which!r}")


def fd_gradient(
    which: str,
    pred: Grid,
    target: Grid,
    h: float = 1e-3,
    config: LossConfig | None = None,
    mask: Grid | None = None,
) -> Grid:
    """Central-difference gradient of a loss with respect to each
    prediction cell, for verifying analytic derivatives on small grids.

    Every prediction value must sit in [h, 1-h] so both probe points stay
    valid probabilities; the grid may hold at most 64 cells.
    """
    cfg = config if config is not None else LossConfig()
    if not 0.0 < h < 0.5:
        raise ValueError(f"h must be in (0, 0.5), got {h}")
    if pred.data.size > FD_GRID_LIMIT:
        raise GridError(
            f"finite differences allow at most {FD_GRID_LIMIT} cells, "
            f"got {pred.data.size}"
        )
    base = pred.data.astype(np.float64)
    if base.size and (base.min() < h or base.max() > 1.0 - h):
        raise GridError(f"prediction values must lie in [{h}, {1.0 - h}]")
    fn = _loss_fn(which, cfg, mask)
    out = np.zeros(pred.shape, dtype=np.float32)
    flat = out.reshape(-1)
    for i in range(base.size):
        probe = base.reshape(-1).copy()
        probe[i] += h
        hi = fn(Grid.real(probe.reshape(pred.shape)), target)
        probe[i] -= 2.0 * h
        lo = fn(Grid.real(probe.reshape(pred.shape)), target)
        flat[i] = (hi - lo) / (2.0 * h)
    return Grid._wrap(out)
