"""Connected components, Euler characteristic, and Betti numbers.

Foreground uses the full neighborhood (8 in 2D, 26 in 3D) and background
the dual axis neighborhood (4 in 2D, 6 in 3D); the Euler characteristic is
computed on the union of closed unit cells, which matches that pairing.
Holes and cavities are counted as background components that do not touch
the grid border, and every 2D profile is cross-checked against the Euler
characteristic so an internal bug cannot return silently wrong counts.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import _kernels
from .core import Adjacency, Grid

__all__ = [
    "LabeledComponents",
    "BettiProfile",
    "TopologyInconsistencyError",
    "label_components",
    "euler_characteristic",
    "border_touching",
    "betti",
]


class TopologyInconsistencyError(RuntimeError):
    """The two independent hole counts disagree; the result is unusable."""


@dataclasses.dataclass(frozen=True, eq=False)
class LabeledComponents:
    """Dense component labels: 0 is background, components are numbered
    1..count in raster first-encounter order."""

    labels: np.ndarray
    count: int

    def __post_init__(self):
        arr = np.asarray(self.labels)
        if arr.dtype != np.int32:
            raise ValueError(f"labels must be int32, got {arr.dtype}")
        if not arr.flags.c_contiguous:
            arr = np.ascontiguousarray(arr)
            arr.flags.writeable = False
        elif arr.flags.writeable:
            arr = arr.copy()
            arr.flags.writeable = False
        object.__setattr__(self, "labels", arr)

    def mask_of(self, component: int) -> Grid:
        if not 1 <= component <= self.count:
            raise ValueError(
                f"component id must be in 1..{self.count}, got {component}"
            )
        return Grid._wrap((self.labels == component).astype(np.uint8))


@dataclasses.dataclass(frozen=True)
class BettiProfile:
    """(components, independent loops, enclosed cavities); b2 is 0 in 2D."""

    b0: int
    b1: int
    b2: int = 0


def _resolve_adjacency(grid: Grid, adjacency: Adjacency | None) -> Adjacency:
    adj = adjacency if adjacency is not None else Adjacency(grid.ndim)
    if adj.ndim != grid.ndim:
        raise ValueError(
            f"adjacency is {adj.ndim}D but the grid is {grid.ndim}D"
        )
    return adj


def label_components(
    mask: Grid,
    adjacency: Adjacency | None = None,
    *,
    connectivity: str = "foreground",
) -> LabeledComponents:
    """Label connected components of the nonzero cells of a binary grid.

    `connectivity` picks which side of the adjacency pair applies to the
    mask: "foreground" is the full neighborhood (8/26), "background" the
    dual axis neighborhood (4/6). Labeling the complement of a mask under
    "background" is how holes and cavities are found.
    """
    mask.require_binary("label_components input")
    _resolve_adjacency(mask, adjacency)
    if connectivity not in ("foreground", "background"):
        raise ValueError(
            f"connectivity must be 'foreground' or 'background', "
            f"got {connectivity!r}"
        )
    labels, count = _kernels.label(mask.data, full=connectivity == "foreground")
    labels.flags.writeable = False
    return LabeledComponents(labels, count)


def euler_characteristic(mask: Grid) -> int:
    """Euler characteristic of the union of closed unit cells of the mask."""
    mask.require_binary("euler_characteristic input")
    return _kernels.euler_char(mask.data)


def border_touching(components: LabeledComponents) -> frozenset[int]:
    """Ids of components with at least one cell on the grid boundary."""
    labels = components.labels
    edge: set[int] = set()
    for ax in range(labels.ndim):
        first = np.take(labels, 0, axis=ax)
        last = np.take(labels, labels.shape[ax] - 1, axis=ax)
        edge.update(np.unique(first).tolist())
        edge.update(np.unique(last).tolist())
    edge.discard(0)
    return frozenset(edge)


def _interior_background_count(mask: Grid) -> int:
    complement = Grid._wrap((mask.data == 0).astype(np.uint8))
    bg = label_components(complement, connectivity="background")
    return bg.count - len(border_touching(bg))


def betti(mask: Grid, adjacency: Adjacency | None = None) -> BettiProfile:
    """Betti numbers (b0, b1, b2) of a binary grid.

    2D: b0 from foreground components, b1 from enclosed background
    components, double-checked against b0 - chi. 3D: b2 from enclosed
    background components and b1 = b0 + b2 - chi.
    """
    mask.require_binary("betti input")
    _resolve_adjacency(mask, adjacency)
    b0 = label_components(mask).count
    chi = euler_characteristic(mask)
    if mask.ndim == 2:
        holes = _interior_background_count(mask)
        if holes != b0 - chi:
            raise TopologyInconsistencyError(
                f"hole counts disagree: background labeling gives {holes}, "
                f"Euler characteristic gives {b0 - chi}"
            )
        return BettiProfile(b0=b0, b1=holes, b2=0)
    cavities = _interior_background_count(mask)
    loops = b0 + cavities - chi
    if loops < 0:
        raise TopologyInconsistencyError(
            f"negative loop count {loops} from b0={b0}, b2={cavities}, chi={chi}"
        )
    return BettiProfile(b0=b0, b1=loops, b2=cavities)
