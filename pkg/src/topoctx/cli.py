"""Command-line surface binding the library into reproducible runs.

Exit codes: 0 success, 1 usage error, 2 data error (unreadable or
malformed inputs, incompatible shapes, domain violations). All output is
deterministic: JSON is emitted with sorted keys and no timestamps, so a
repeated command is byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .core import (
    Grid,
    LossConfig,
    binarize,
    read_btf,
    read_pgm,
    write_btf,
)
from .critical_mask import MODES, critical_mask
from .fixtures import gen_gap_line, gen_random, gen_tiling_artifact
from .losses import context_loss
from .metrics import METRIC_GROUPS, ZSLICE, EvalProtocol, evaluate_pair
from .morphology import hard_skeleton, soft_skeleton, distance_transform_sq
from .postproc import topological_postprocess
from .topology import betti, euler_characteristic, label_components

GAMMA_HELP = (
    "context reweighting in [0, 1] (default 0.2; keep it below 0.5 so the "
    "critical-region term stays a refinement of the base loss)"
)


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this surface uses 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_grid(path: str) -> Grid:
    if path.endswith(".pgm"):
        return read_pgm(path)
    return read_btf(path)


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_extents(text: str, what: str) -> tuple[int, ...]:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise ValueError(f"{what} must be comma-separated integers, got {text!r}")
    if len(parts) not in (2, 3):
        raise ValueError(f"{what} must have 2 or 3 extents, got {text!r}")
    return parts


def _parse_patch(token: str):
    if token in ("whole", "image"):
        return None
    if token == ZSLICE:
        return ZSLICE
    return tuple(int(p) for p in token.split(","))


def _parse_curve(text: str) -> list[tuple[int, int]]:
    pts = []
    for chunk in text.split(";"):
        r, c = chunk.split(",")
        pts.append((int(r), int(c)))
    return pts


# ---------------------------------------------------------------------------
# subcommand implementations


def _cmd_skeletonize(args) -> int:
    grid = _read_grid(args.input)
    if args.hard:
        out = hard_skeleton(grid, args.iters)
    else:
        out = soft_skeleton(grid, args.iters)
    write_btf(out, args.output)
    return 0


def _cmd_distmap(args) -> int:
    grid = _read_grid(args.input)
    write_btf(distance_transform_sq(grid).to_real_grid(), args.output)
    return 0


def _cmd_betti(args) -> int:
    grid = _read_grid(args.input)
    profile = betti(grid)
    _emit(
        {
            "b0": profile.b0,
            "b1": profile.b1,
            "b2": profile.b2,
            "euler": euler_characteristic(grid),
            "ndim": grid.ndim,
        },
        args.out,
    )
    return 0


def _cmd_mask(args) -> int:
    pred = _read_grid(args.prediction)
    target = _read_grid(args.label)
    cfg = LossConfig(skeleton_iters=args.iters)
    cm = critical_mask(pred, target, cfg, mode=args.mode)
    prefix = args.out_prefix
    files = {
        "gap": f"{prefix}_gap.btf",
        "false_positive": f"{prefix}_fp.btf",
        "mask": f"{prefix}_mask.btf",
    }
    write_btf(cm.gap, files["gap"])
    write_btf(cm.false_positive, files["false_positive"])
    write_btf(cm.mask, files["mask"])
    _emit(
        {
            "cells": {
                "gap": cm.gap.count,
                "false_positive": cm.false_positive.count,
                "mask": cm.mask.count,
            },
            "files": files,
            "mode": args.mode,
        },
        args.out,
    )
    return 0


def _cmd_loss(args) -> int:
    pred = _read_grid(args.prediction)
    target = _read_grid(args.label)
    cfg = LossConfig(
        alpha=args.alpha,
        gamma=args.gamma,
        smooth=args.smooth,
        clamp=args.clamp,
        skeleton_iters=args.iters,
    )
    value, cm = context_loss(pred, target, cfg, return_mask=True)
    _emit(
        {
            "total": value.total,
            "parts": dict(value.parts),
            "mask_cells": cm.mask.count,
            "config": {
                "alpha": cfg.alpha,
                "gamma": cfg.gamma,
                "smooth": cfg.smooth,
                "clamp": cfg.clamp,
                "skeleton_iters": cfg.skeleton_iters,
            },
        },
        args.out,
    )
    return 0


def _collect_pairs(args) -> list[tuple[str, str]]:
    pairs: list[tuple[str, str]] = [tuple(p) for p in (args.pair or [])]
    if (args.pred_dir is None) != (args.label_dir is None):
        raise ValueError("--pred-dir and --label-dir must be given together")
    if args.pred_dir is not None:
        pred_dir = Path(args.pred_dir)
        label_dir = Path(args.label_dir)
        if not pred_dir.is_dir() or not label_dir.is_dir():
            raise ValueError("--pred-dir/--label-dir must be directories")
        for entry in sorted(p.name for p in pred_dir.iterdir() if p.is_file()):
            other = label_dir / entry
            if not other.is_file():
                raise ValueError(f"no label file matching {entry!r}")
            pairs.append((str(pred_dir / entry), str(other)))
    if not pairs:
        raise ValueError("no input pairs: use --pair or --pred-dir/--label-dir")
    return pairs


def _cmd_eval(args) -> int:
    pairs = _collect_pairs(args)
    specs = {}
    for metric, token in args.patch or []:
        if metric not in METRIC_GROUPS:
            raise ValueError(
                f"unknown metric {metric!r}; choose from {METRIC_GROUPS}"
            )
        specs[metric] = _parse_patch(token)
    stride = _parse_extents(args.stride, "--stride") if args.stride else None
    proto = EvalProtocol(stride=stride, skeleton_iters=args.iters, **specs)

    def run(pair: tuple[str, str]):
        pred, label = pair
        return evaluate_pair(_read_grid(pred), _read_grid(label), proto, image_id=pred)

    if args.threads > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            reports = list(pool.map(run, pairs))
    else:
        reports = [run(p) for p in pairs]

    pooled: dict[str, list[float]] = {}
    image_means: dict[str, list[float]] = {}
    for rep in reports:
        for rec in rep.tiles:
            pooled.setdefault(rec.metric, []).append(float(rec.value))
        for metric, mean in rep.aggregates.items():
            image_means.setdefault(metric, []).append(mean)
    aggregate = {
        "mean_of_image_means": {
            m: float(np.mean(np.asarray(v, dtype=np.float64)))
            for m, v in image_means.items()
        },
        "pooled_tiles": {
            m: float(np.mean(np.asarray(v, dtype=np.float64)))
            for m, v in pooled.items()
        },
    }
    _emit(
        {
            "reports": [rep.to_dict() for rep in reports],
            "aggregate": aggregate,
        },
        args.out,
    )
    return 0


def _cmd_postproc(args) -> int:
    fine = _read_grid(args.fine)
    coarse = _read_grid(args.coarse)
    kept = topological_postprocess(fine, coarse)
    write_btf(kept, args.output)
    before = label_components(fine).count
    after = label_components(kept).count
    _emit(
        {
            "components_before": before,
            "components_kept": after,
            "components_removed": before - after,
            "cells_kept": kept.count,
        },
        args.out,
    )
    return 0


def _cmd_fixture(args) -> int:
    if args.scenario == "gapline":
        shape = _parse_extents(args.shape, "--shape")
        target, broken = gen_gap_line(
            shape,
            length=args.length,
            thickness=args.thickness,
            gap_at=args.gap_at,
            gap_width=args.gap_width,
        )
        write_btf(target, args.out_target)
        write_btf(broken, args.out_broken)
        return 0
    if args.scenario == "artifact":
        shape = _parse_extents(args.shape, "--shape")
        tile = _parse_extents(args.tile, "--tile")
        curve = _parse_curve(args.curve) if args.curve else None
        target, thin, thick = gen_tiling_artifact(
            shape, tile, thin=args.thin, thick=args.thick, curve=curve
        )
        write_btf(target, args.out_target)
        write_btf(thin, args.out_thin)
        write_btf(thick, args.out_thick)
        return 0
    # random
    shape = _parse_extents(args.shape, "--shape")
    grid = gen_random(shape, density=args.density, seed=args.seed)
    write_btf(grid, args.output)
    return 0


# ---------------------------------------------------------------------------
# parser wiring


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="topoctx",
        description=(
            "Topology-aware segmentation tools: skeletons, distance maps, "
            "Betti profiles, critical-pixel masks, context-weighted losses, "
            "tiled metric reports, and component post-processing."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("skeletonize", help="thin a grid to its skeleton")
    p.add_argument("input", help="input BTF (or .pgm) grid")
    p.add_argument("output", help="output BTF path")
    p.add_argument("--iters", type=int, default=50, help="thinning rounds (default 50)")
    p.add_argument(
        "--hard",
        action="store_true",
        help="binary skeleton of a binary grid (default: soft, real-valued)",
    )
    p.set_defaults(fn=_cmd_skeletonize)

    p = sub.add_parser("distmap", help="exact squared distance to the nonzero cells")
    p.add_argument("input", help="binary BTF grid of seeds")
    p.add_argument("output", help="output BTF path (float32; INF as float32 max)")
    p.set_defaults(fn=_cmd_distmap)

    p = sub.add_parser("betti", help="component/loop/cavity counts of a binary grid")
    p.add_argument("input", help="binary BTF grid")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(fn=_cmd_betti)

    p = sub.add_parser(
        "mask", help="critical-pixel regions of a prediction vs its label"
    )
    p.add_argument("prediction", help="probability or binary BTF grid")
    p.add_argument("label", help="binary BTF grid")
    p.add_argument("--out-prefix", required=True, help="writes PREFIX_gap.btf, PREFIX_fp.btf, PREFIX_mask.btf")
    p.add_argument("--mode", choices=MODES, default="soft", help="prediction skeleton source (default soft)")
    p.add_argument("--iters", type=int, default=50, help="skeleton thinning rounds (default 50)")
    p.add_argument("--out", help="write the JSON summary here instead of stdout")
    p.set_defaults(fn=_cmd_mask)

    p = sub.add_parser("loss", help="context-weighted loss of a prediction vs its label")
    p.add_argument("prediction", help="probability or binary BTF grid")
    p.add_argument("label", help="binary BTF grid")
    p.add_argument("--alpha", type=float, default=0.5, help="cross-entropy weight in the pixel term (default 0.5)")
    p.add_argument("--gamma", type=float, default=0.2, help=GAMMA_HELP)
    p.add_argument("--smooth", type=float, default=1e-5, help="overlap smoothing constant (default 1e-5)")
    p.add_argument("--clamp", type=float, default=1e-7, help="probability clamp for log terms (default 1e-7)")
    p.add_argument("--iters", type=int, default=50, help="skeleton thinning rounds (default 50)")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(fn=_cmd_loss)

    p = sub.add_parser("eval", help="tiled metric report for prediction/label pairs")
    p.add_argument(
        "--pair",
        nargs=2,
        action="append",
        metavar=("PRED", "LABEL"),
        help="one prediction/label file pair (repeatable)",
    )
    p.add_argument("--pred-dir", help="directory of predictions (matched to --label-dir by file name)")
    p.add_argument("--label-dir", help="directory of labels")
    p.add_argument(
        "--patch",
        nargs=2,
        action="append",
        metavar=("METRIC", "TILE"),
        help=(
            "tile shape per metric: one of dice/cldice/ags/e0_gt/betti and "
            "'R,C', 'Z,Y,X', 'zslice', or 'whole' (default whole)"
        ),
    )
    p.add_argument("--stride", help="window stride R,C[,Z] (default: the tile shape)")
    p.add_argument("--iters", type=int, default=50, help="skeleton thinning rounds (default 50)")
    p.add_argument("--threads", type=int, default=1, help="worker threads; results independent of the value")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.set_defaults(fn=_cmd_eval)

    p = sub.add_parser("postproc", help="keep fine components confirmed by the coarse mask")
    p.add_argument("fine", help="binary BTF grid (fine stage)")
    p.add_argument("coarse", help="binary BTF grid (coarse stage)")
    p.add_argument("output", help="output BTF path")
    p.add_argument("--out", help="write the JSON summary here instead of stdout")
    p.set_defaults(fn=_cmd_postproc)

    p = sub.add_parser("fixture", help="generate deterministic test scenes")
    fsub = p.add_subparsers(dest="scenario", required=True, parser_class=_Parser)

    f = fsub.add_parser("gapline", help="bar with a gap: target + broken prediction")
    f.add_argument("--shape", default="3,7", help="grid extents, e.g. 3,7 (default 3,7)")
    f.add_argument("--length", type=int, default=7, help="bar length along the last axis (default 7)")
    f.add_argument("--thickness", type=int, default=3, help="bar thickness (default 3)")
    f.add_argument("--gap-at", type=int, default=3, help="gap offset into the bar (default 3)")
    f.add_argument("--gap-width", type=int, default=1, help="gap width, 0 for no gap (default 1)")
    f.add_argument("--out-target", required=True, help="BTF path for the intact bar")
    f.add_argument("--out-broken", required=True, help="BTF path for the bar with the gap")
    f.set_defaults(fn=_cmd_fixture)

    f = fsub.add_parser(
        "artifact",
        help="curve at two widths that fragments under tiled component counts",
    )
    f.add_argument("--shape", default="16,16", help="grid extents (default 16,16)")
    f.add_argument("--tile", default="8,8", help="tile extents the scenario targets (default 8,8)")
    f.add_argument("--thin", type=int, default=1, help="thin rendering width, odd (default 1)")
    f.add_argument("--thick", type=int, default=3, help="thick rendering width, odd (default 3)")
    f.add_argument("--curve", help="polyline 'r,c;r,c;...' (default: hugs the first tile boundary)")
    f.add_argument("--out-target", required=True, help="BTF path for the reference")
    f.add_argument("--out-thin", required=True, help="BTF path for the thin prediction")
    f.add_argument("--out-thick", required=True, help="BTF path for the thick prediction")
    f.set_defaults(fn=_cmd_fixture)

    f = fsub.add_parser("random", help="seeded random binary grid")
    f.add_argument("--shape", default="16,16", help="grid extents (default 16,16)")
    f.add_argument("--density", type=float, default=0.5, help="foreground probability (default 0.5)")
    f.add_argument("--seed", type=int, default=0, help="PRNG seed (default 0)")
    f.add_argument("--output", required=True, help="BTF path")
    f.set_defaults(fn=_cmd_fixture)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"topoctx: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
