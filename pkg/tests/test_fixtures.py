"""Synthetic test-case generators."""

import numpy as np
import pytest

from topoctx import (
    Grid,
    betti,
    gen_gap_line,
    gen_random,
    gen_tiling_artifact,
    hard_skeleton,
)


class TestGenGapLine:
    def test_geometry(self):
        target, broken = gen_gap_line((3, 7), length=5, thickness=1)
        expect = np.zeros((3, 7), dtype=np.uint8)
        expect[1, 1:6] = 1
        assert np.array_equal(target.data, expect)
        missing = target.data & ~broken.data
        assert missing.sum() == 1 and missing[1, 3] == 1

    def test_zero_gap_width_gives_identical_grids(self):
        target, broken = gen_gap_line((3, 7), length=7, gap_width=0)
        assert target == broken

    def test_thin_bar_is_its_own_skeleton(self):
        target, _ = gen_gap_line((5, 9), length=7, thickness=1)
        assert hard_skeleton(target) == target

    def test_gap_splits_component(self):
        target, broken = gen_gap_line((3, 9), length=9, thickness=3)
        assert betti(target).b0 == 1
        assert betti(broken).b0 == 2

    def test_explicit_gap_position(self):
        target, broken = gen_gap_line((1, 8), length=8, gap_at=0, gap_width=2)
        missing = target.data & ~broken.data
        assert missing[0].tolist() == [1, 1, 0, 0, 0, 0, 0, 0]

    def test_3d(self):
        target, broken = gen_gap_line((3, 3, 7), length=7, thickness=1)
        assert target.ndim == 3
        assert target.count == 7
        assert target.count - broken.count == 1

    def test_validation(self):
        with pytest.raises(ValueError):
            gen_gap_line((3, 7), length=8)
        with pytest.raises(ValueError):
            gen_gap_line((3, 7), length=7, thickness=4)
        with pytest.raises(ValueError):
            gen_gap_line((3, 7), length=7, gap_at=7, gap_width=1)
        with pytest.raises(ValueError):
            gen_gap_line((3, 7), length=7, gap_width=-1)


class TestGenTilingArtifact:
    def test_thin_prediction_equals_target(self):
        target, thin, thick = gen_tiling_artifact()
        assert thin == target
        assert thin is not target

    def test_thick_contains_target(self):
        target, _, thick = gen_tiling_artifact()
        assert not np.any(target.data & ~thick.data)
        assert thick.count > target.count

    def test_whole_image_component_counts_match(self):
        target, thin, thick = gen_tiling_artifact()
        assert betti(thin).b0 == betti(target).b0 == betti(thick).b0 == 1

    def test_thick_crosses_tile_boundary(self):
        _, thin, thick = gen_tiling_artifact(shape=(16, 16), tile=(8, 8))
        assert not thin.data[8:].any()
        assert thick.data[8:].any()

    def test_validation(self):
        with pytest.raises(ValueError):
            gen_tiling_artifact(thin=2)
        with pytest.raises(ValueError):
            gen_tiling_artifact(thin=3, thick=3)
        with pytest.raises(ValueError):
            gen_tiling_artifact(curve=[(0, 0)])
        with pytest.raises(ValueError):
            gen_tiling_artifact(curve=[(0, 0), (99, 0)])


class TestGenRandom:
    def test_seed_determinism(self):
        assert gen_random((8, 8), seed=5) == gen_random((8, 8), seed=5)
        assert gen_random((8, 8), seed=5) != gen_random((8, 8), seed=6)

    def test_density_extremes(self):
        assert gen_random((6, 6), density=0.0).count == 0
        assert gen_random((6, 6), density=1.0).count == 36

    def test_3d(self):
        g = gen_random((4, 5, 6), density=0.5, seed=1)
        assert g.shape == (4, 5, 6) and g.is_binary

    def test_validation(self):
        with pytest.raises(ValueError):
            gen_random((0, 4))
        with pytest.raises(ValueError):
            gen_random((4, 4), density=1.5)
