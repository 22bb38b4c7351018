"""Topology-aware segmentation toolkit for 2D/3D grids.

Core pieces: exact squared distance transforms and soft skeletons, Betti
profiles on cubical grids, critical-pixel mask extraction, context-weighted
losses, tiled metric reports, and component-level post-processing. Hot
kernels run as compiled numba loops by default; set ``TOPOCTX_BACKEND=numpy``
for the pure-numpy fallback (bit-identical results).
"""

from ._backend import active_backend, set_backend
from .core import (
    ADJACENCY_2D,
    ADJACENCY_3D,
    Adjacency,
    BadMagicError,
    BadNdimError,
    BtfError,
    Grid,
    GridError,
    LossConfig,
    PgmError,
    TruncatedPayloadError,
    UnknownDtypeError,
    binarize,
    read_btf,
    read_pgm,
    write_btf,
)
from .critical_mask import CriticalMask, context_region, critical_mask, split_skeleton
from .fixtures import gen_gap_line, gen_random, gen_tiling_artifact
from .losses import (
    LossValue,
    ce_loss,
    context_loss,
    dice_loss,
    fd_gradient,
    pixel_loss,
)
from .metrics import (
    EvalProtocol,
    MetricReport,
    TileRecord,
    ags,
    betti_errors,
    cldice_metric,
    dice_score,
    e0_gt,
    evaluate_pair,
    tile_origins,
)
from .morphology import (
    INF_SQDIST,
    DistanceField,
    distance_transform_sq,
    hard_skeleton,
    soft_dilate,
    soft_erode,
    soft_open,
    soft_skeleton,
)
from .postproc import topological_postprocess
from .topology import (
    BettiProfile,
    LabeledComponents,
    TopologyInconsistencyError,
    betti,
    border_touching,
    euler_characteristic,
    label_components,
)

__version__ = "0.1.0"

__all__ = [
    "ADJACENCY_2D",
    "ADJACENCY_3D",
    "Adjacency",
    "BadMagicError",
    "BadNdimError",
    "BettiProfile",
    "BtfError",
    "CriticalMask",
    "DistanceField",
    "EvalProtocol",
    "Grid",
    "GridError",
    "INF_SQDIST",
    "LabeledComponents",
    "LossConfig",
    "LossValue",
    "MetricReport",
    "PgmError",
    "TileRecord",
    "TopologyInconsistencyError",
    "TruncatedPayloadError",
    "UnknownDtypeError",
    "active_backend",
    "ags",
    "betti",
    "betti_errors",
    "binarize",
    "border_touching",
    "ce_loss",
    "cldice_metric",
    "context_loss",
    "context_region",
    "critical_mask",
    "dice_loss",
    "dice_score",
    "distance_transform_sq",
    "e0_gt",
    "euler_characteristic",
    "evaluate_pair",
    "fd_gradient",
    "gen_gap_line",
    "gen_random",
    "gen_tiling_artifact",
    "hard_skeleton",
    "label_components",
    "pixel_loss",
    "read_btf",
    "read_pgm",
    "set_backend",
    "soft_dilate",
    "soft_erode",
    "soft_open",
    "soft_skeleton",
    "split_skeleton",
    "tile_origins",
    "topological_postprocess",
    "write_btf",
]
