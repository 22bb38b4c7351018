"""End-to-end acceptance checks.

One test per shipped guarantee; each line of the -v run is one criterion.
Randomized loops are seeded, tolerances are stated at the assert site, and
oracle comparisons are exact unless a tolerance says otherwise.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from topoctx import (
    BettiProfile,
    EvalProtocol,
    Grid,
    LossConfig,
    active_backend,
    ags,
    betti,
    ce_loss,
    context_loss,
    critical_mask,
    dice_loss,
    distance_transform_sq,
    e0_gt,
    evaluate_pair,
    fd_gradient,
    gen_tiling_artifact,
    hard_skeleton,
    label_components,
    pixel_loss,
    topological_postprocess,
    write_btf,
)
from topoctx._kernels import INF_SQDIST
from topoctx.topology import euler_characteristic
from conftest import make_rng, random_binary
from oracles import (
    brute_critical_mask,
    brute_euler,
    brute_holes,
    brute_sqdist,
    flood_labels,
)


def _random_shape(rng, ndim: int, low: int, high: int) -> tuple[int, ...]:
    return tuple(int(rng.integers(low, high + 1)) for _ in range(ndim))


def test_binary_mode_mask_matches_bruteforce_oracle():
    rng = make_rng(100)
    started = time.perf_counter()

    def check(x: Grid, y: Grid):
        out = critical_mask(x, y, mode="binary")
        gap, fp, mask = brute_critical_mask(x.data, y.data, 50)
        assert np.array_equal(out.gap.data, gap)
        assert np.array_equal(out.false_positive.data, fp)
        assert np.array_equal(out.mask.data, mask)

    for i in range(200):
        shape = _random_shape(rng, 2, 3, 16)
        density = float(rng.uniform(0.15, 0.75))
        x = random_binary(rng, shape, density)
        y = random_binary(rng, shape, density)
        if i == 0:
            x = Grid.binary(np.zeros(shape, dtype=np.uint8))
        elif i == 1:
            y = Grid.binary(np.zeros(shape, dtype=np.uint8))
        elif i == 2:
            x = Grid.binary(np.ones(shape, dtype=np.uint8))
            y = Grid.binary(np.ones(shape, dtype=np.uint8))
        check(x, y)

    for _ in range(50):
        shape = _random_shape(rng, 3, 3, 12)
        density = float(rng.uniform(0.15, 0.6))
        check(random_binary(rng, shape, density), random_binary(rng, shape, density))

    assert time.perf_counter() - started < 60.0


def test_perfect_prediction_identity():
    rng = make_rng(101)
    for i in range(100):
        ndim = 2 if i % 2 == 0 else 3
        shape = _random_shape(rng, ndim, 3, 14 if ndim == 2 else 9)
        y = random_binary(rng, shape, float(rng.uniform(0.0, 1.0)))
        cm = critical_mask(y, y)
        assert cm.mask.count == 0
        assert context_loss(y, y).total <= 2e-5


def test_betti_profiles_and_chi_consistency():
    cube = Grid.binary(np.ones((4, 4, 4), dtype=np.uint8))
    assert betti(cube) == BettiProfile(1, 0, 0)

    ring = np.ones((3, 3), dtype=np.uint8)
    ring[1, 1] = 0
    assert betti(Grid.binary(ring)) == BettiProfile(1, 1, 0)

    torus = np.stack([ring, ring])
    assert betti(Grid.binary(torus)) == BettiProfile(1, 1, 0)

    shell = np.ones((3, 3, 3), dtype=np.uint8)
    shell[1, 1, 1] = 0
    assert betti(Grid.binary(shell)) == BettiProfile(1, 0, 1)

    rng = make_rng(102)
    for i in range(500):
        ndim = 2 if i % 2 == 0 else 3
        shape = _random_shape(rng, ndim, 2, 16 if ndim == 2 else 10)
        g = random_binary(rng, shape, float(rng.uniform(0.2, 0.8)))
        p = betti(g)
        assert p.b0 - p.b1 + p.b2 == euler_characteristic(g)
        if ndim == 3:
            # ground the derived loop count: components and cavities both
            # match independent flood fills
            assert p.b0 == flood_labels(g.data, full=True)[1]
            assert p.b2 == brute_holes(g.data)


def test_2d_loop_count_double_method_agreement():
    rng = make_rng(103)
    for _ in range(500):
        g = random_binary(rng, (32, 32), float(rng.uniform(0.25, 0.75)))
        via_background = brute_holes(g.data)
        via_euler = flood_labels(g.data, full=True)[1] - brute_euler(g.data)
        assert via_background == via_euler
        assert betti(g).b1 == via_background


def test_distance_transform_matches_exhaustive_oracle():
    rng = make_rng(104)

    def check(g: Grid):
        got = distance_transform_sq(g).data.astype(np.float64)
        got[got == np.float64(INF_SQDIST)] = np.inf
        assert np.array_equal(got, brute_sqdist(g.data))

    for i in range(200):
        density = 0.0 if i == 0 else float(rng.uniform(0.02, 0.9))
        check(random_binary(rng, (9, 9), density))
    for _ in range(50):
        check(random_binary(rng, (8, 8, 8), float(rng.uniform(0.02, 0.6))))


def test_tiling_artifact_reproduction():
    started = time.perf_counter()
    target, thin, thick = gen_tiling_artifact(shape=(16, 16), tile=(8, 8))
    proto = EvalProtocol(betti=(8, 8), e0_gt=(8, 8), ags=(8, 8))

    thin_report = evaluate_pair(thin, target, proto, image_id="thin")
    thick_report = evaluate_pair(thick, target, proto, image_id="thick")

    # the thick rendering fragments under tiled component counts
    assert thick_report.aggregates["e0"] > thin_report.aggregates["e0"]
    # while the mask-restricted component error cannot see the thickening
    assert thick_report.aggregates["e0_gt"] == thin_report.aggregates["e0_gt"]
    assert e0_gt(thick, target) == e0_gt(thin, target)
    # and skeleton coverage does not degrade either
    assert thick_report.aggregates["ags"] >= thin_report.aggregates["ags"]
    assert ags(thick, target) >= ags(thin, target)

    # whole-image component counts agree, so the tiled gap is pure artifact
    assert betti(thick).b0 == betti(thin).b0 == betti(target).b0

    again = evaluate_pair(thick, target, proto, image_id="thick")
    assert again.to_json() == thick_report.to_json()
    assert time.perf_counter() - started < 5.0


def test_metric_identities():
    rng = make_rng(105)
    for _ in range(100):
        shape = _random_shape(rng, 2, 4, 14)
        x = random_binary(rng, shape, float(rng.uniform(0.2, 0.7)))
        y = random_binary(rng, shape, float(rng.uniform(0.2, 0.7)))
        masked = Grid.binary(x.to_bool() & y.to_bool())
        assert e0_gt(x, y) == e0_gt(masked, y)

    for _ in range(100):
        shape = _random_shape(rng, 2, 4, 14)
        x = random_binary(rng, shape, float(rng.uniform(0.2, 0.7)))
        y = random_binary(rng, shape, float(rng.uniform(0.2, 0.7)))
        noise = random_binary(rng, shape, 0.4)
        sy = hard_skeleton(y).to_bool()
        flipped = Grid.binary((x.to_bool() & sy) | (noise.to_bool() & ~sy))
        assert ags(flipped, y) == ags(x, y)


def test_loss_analytics():
    rng = make_rng(106)

    half = Grid.real(np.full((6, 6), 0.5, dtype=np.float32))
    any_target = random_binary(rng, (6, 6))
    assert abs(ce_loss(half, any_target) - math.log(2.0)) <= 1e-6

    half_fg = np.zeros((6, 6), dtype=np.uint8)
    half_fg[:3] = 1
    assert abs(dice_loss(half, Grid.binary(half_fg)) - 0.5) <= 1e-5

    for _ in range(50):
        p = Grid.real((0.2 + 0.6 * rng.random((4, 4))).astype(np.float32))
        g = random_binary(rng, (4, 4))
        got = fd_gradient("ce", p, g).data
        pf = p.data.astype(np.float64)
        gf = g.data.astype(np.float64)
        want = -(gf / pf - (1.0 - gf) / (1.0 - pf)) / pf.size
        assert np.max(np.abs(got - want)) <= 1e-4

    p = Grid.real(rng.random((10, 10)).astype(np.float32))
    g = random_binary(rng, (10, 10), 0.4)
    base_cfg = LossConfig()
    cm = critical_mask(p, g, base_cfg)
    base = pixel_loss(p, g, base_cfg).total
    masked = pixel_loss(p, g, base_cfg, mask=cm.mask).total
    for gamma in (0.0, 0.25, 0.5, 1.0):
        cfg = LossConfig(gamma=gamma)
        want = (1.0 - gamma) * base + gamma * masked
        assert abs(context_loss(p, g, cfg).total - want) <= 1e-12


def test_postprocess_invariants():
    rng = make_rng(107)
    for i in range(200):
        ndim = 2 if i % 2 == 0 else 3
        shape = _random_shape(rng, ndim, 4, 12 if ndim == 2 else 8)
        fine = random_binary(rng, shape, float(rng.uniform(0.15, 0.5)))
        coarse = random_binary(rng, shape, float(rng.uniform(0.05, 0.4)))
        out = topological_postprocess(fine, coarse)

        assert not np.any(out.data & ~fine.data)

        comps = label_components(fine)
        for cid in range(1, comps.count + 1):
            comp = comps.mask_of(cid).to_bool()
            overlaps = bool(np.any(comp & coarse.to_bool()))
            kept = bool(np.any(comp & out.to_bool()))
            assert kept == overlaps
            if kept:
                assert np.array_equal(comp & out.to_bool(), comp)

        assert topological_postprocess(out, coarse) == out
        assert label_components(out).count <= comps.count


def test_performance_targets():
    assert active_backend() == "numba", "performance targets hold on the jitted path"
    rng = make_rng(108)

    seeds = random_binary(rng, (64, 64), 0.5)
    distance_transform_sq(seeds)
    hard_skeleton(random_binary(rng, (16, 16, 8), 0.5), 2)
    label_components(random_binary(rng, (16, 16, 16), 0.5))

    big2d = random_binary(rng, (1024, 1024), 0.5)
    started = time.perf_counter()
    distance_transform_sq(big2d)
    edt_s = time.perf_counter() - started
    assert edt_s < 0.25, f"squared EDT on 1024x1024 took {edt_s:.3f}s"

    volume = Grid.binary(np.ones((256, 256, 64), dtype=np.uint8))
    started = time.perf_counter()
    hard_skeleton(volume, 50)
    skel_s = time.perf_counter() - started
    assert skel_s < 15.0, f"50-round skeleton on 256x256x64 took {skel_s:.2f}s"

    big3d = random_binary(rng, (256, 256, 256), 0.5)
    started = time.perf_counter()
    label_components(big3d)
    label_s = time.perf_counter() - started
    assert label_s < 2.0, f"labeling 256^3 took {label_s:.2f}s"


def test_cli_determinism(tmp_path):
    base = tmp_path / "inputs"
    base.mkdir()
    rng = make_rng(109)
    fine = random_binary(rng, (9, 9), 0.3)
    coarse = random_binary(rng, (9, 9), 0.2)
    prob = Grid.real(rng.random((8, 8)).astype(np.float32))
    write_btf(fine, base / "fine.btf")
    write_btf(coarse, base / "coarse.btf")
    write_btf(prob, base / "prob.btf")

    def fixture_cmds(outdir):
        return [
            (
                "gapline",
                ["fixture", "gapline", "--shape", "3,9", "--length", "9",
                 "--out-target", str(outdir / "t.btf"),
                 "--out-broken", str(outdir / "b.btf")],
            ),
            (
                "artifact",
                ["fixture", "artifact",
                 "--out-target", str(outdir / "at.btf"),
                 "--out-thin", str(outdir / "athin.btf"),
                 "--out-thick", str(outdir / "athick.btf")],
            ),
            (
                "random",
                ["fixture", "random", "--shape", "8,8", "--seed", "7",
                 "--output", str(outdir / "r.btf")],
            ),
        ]

    def main_cmds(outdir):
        t = str(outdir / "t.btf")
        b = str(outdir / "b.btf")
        return [
            ("skeletonize", ["skeletonize", t, str(outdir / "skel.btf"), "--hard"]),
            ("skeletonize-soft", ["skeletonize", str(base / "prob.btf"), str(outdir / "soft.btf")]),
            ("distmap", ["distmap", b, str(outdir / "dist.btf")]),
            ("betti", ["betti", t]),
            ("mask", ["mask", b, t, "--out-prefix", str(outdir / "cm")]),
            ("loss", ["loss", b, t, "--gamma", "0.3"]),
            (
                "eval",
                ["eval", "--pair", b, t, "--patch", "betti", "3,3",
                 "--patch", "ags", "whole"],
            ),
            (
                "postproc",
                ["postproc", str(base / "fine.btf"), str(base / "coarse.btf"),
                 str(outdir / "kept.btf")],
            ),
        ]

    outdir = tmp_path / "out"
    outdir.mkdir()

    def run_all():
        # same paths both times: the second pass overwrites every artifact
        stdouts = {}
        for name, argv in fixture_cmds(outdir) + main_cmds(outdir):
            proc = subprocess.run(
                [sys.executable, "-m", "topoctx", *argv],
                capture_output=True,
            )
            assert proc.returncode == 0, f"{name}: {proc.stderr.decode()}"
            stdouts[name] = proc.stdout
        files = {
            p.name: p.read_bytes() for p in sorted(outdir.iterdir()) if p.is_file()
        }
        return stdouts, files

    first_out, first_files = run_all()
    second_out, second_files = run_all()
    for name in first_out:
        assert first_out[name] == second_out[name], f"stdout differs for {name}"
    assert first_files == second_files
