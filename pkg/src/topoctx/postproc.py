"""Topological post-processing for two-stage (coarse then fine) pipelines.

The fine stage tends to hallucinate small components where the coarse
stage saw nothing. Keep exactly those fine components that overlap the
coarse mask in at least one cell; drop the rest.
"""

from __future__ import annotations

import numpy as np

from .core import Adjacency, Grid, GridError
from .topology import label_components

__all__ = ["topological_postprocess"]


def topological_postprocess(
    fine: Grid, coarse: Grid, adjacency: Adjacency | None = None
) -> Grid:
    """Filter `fine` to the components confirmed by `coarse`.

    Both grids are binary with equal shapes. The output is a subset of
    `fine`; kept components survive unchanged, so cells covered by
    `coarse` are never removed unless their whole component misses it.
    """
    fine.require_binary("fine mask")
    coarse.require_binary("coarse mask")
    if fine.shape != coarse.shape:
        raise GridError(f"shapes differ: {fine.shape} vs {coarse.shape}")
    comps = label_components(fine, adjacency)
    if comps.count == 0:
        return Grid._wrap(np.zeros(fine.shape, dtype=np.uint8))
    confirmed = np.unique(comps.labels[coarse.to_bool()])
    confirmed = confirmed[confirmed > 0]
    keep = np.isin(comps.labels, confirmed) & (comps.labels > 0)
    return Grid._wrap(keep.astype(np.uint8))
