import numpy as np
import pytest

from depthbench.geometry import DisparityMap
from depthbench.losses.photometric import PredictiveMask
from depthbench.losses.regularizers import (
    SmoothnessConfig,
    explainability_reg,
    occlusion_loss,
    smoothness_loss,
)

ALL_CONFIGS = [
    SmoothnessConfig(order=1, edge_aware=False),
    SmoothnessConfig(order=1, edge_aware=True),
    SmoothnessConfig(order=2, edge_aware=False),
    SmoothnessConfig(order=2, edge_aware=True),
    SmoothnessConfig(order=1, edge_aware=True, gaussian_sigma=1.0),
]


class TestSmoothness:
    def test_constant_disparity_is_zero(self, rng):
        disp = DisparityMap(np.full((8, 8), 0.3))
        image = rng.random((8, 8, 3))
        for config in ALL_CONFIGS:
            assert smoothness_loss(disp, image, config) == pytest.approx(0.0, abs=1e-12)

    def test_rescaling_invariance(self, rng):
        base = rng.random((10, 10)) * 0.08 + 0.01
        image = rng.random((10, 10, 3))
        for config in ALL_CONFIGS:
            reference = smoothness_loss(DisparityMap(base), image, config)
            for k in (0.1, 1.0, 10.0):
                scaled = smoothness_loss(DisparityMap(np.clip(base * k, 0, 1)), image, config)
                assert scaled == pytest.approx(reference, rel=1e-9)

    def test_edge_aware_ramp_hand_value(self):
        # x-ramp disparity with slope g; image with x-gradient ln 2 so the
        # damping factor is exactly 0.5; y terms vanish
        w, h, g = 6, 4, 0.05
        disp_vals = 0.1 + g * np.arange(w)
        disp = DisparityMap(np.tile(disp_vals, (h, 1)))
        image = np.tile(np.log(2.0) * np.arange(w), (h, 1))
        g_norm = g / disp.values.mean()
        expected = (g_norm * 0.5 + 0.0) / 2.0
        config = SmoothnessConfig(order=1, edge_aware=True)
        assert smoothness_loss(disp, image, config) == pytest.approx(expected, rel=1e-12)

    def test_edge_aware_never_exceeds_plain(self, rng):
        disp = DisparityMap(rng.random((9, 9)))
        image = rng.random((9, 9))
        for order in (1, 2):
            plain = smoothness_loss(disp, None, SmoothnessConfig(order=order, edge_aware=False))
            aware = smoothness_loss(disp, image, SmoothnessConfig(order=order, edge_aware=True))
            assert aware <= plain + 1e-15

    def test_tiny_sigma_converges_to_unsmoothed(self, rng):
        disp = DisparityMap(rng.random((8, 8)))
        image = rng.random((8, 8))
        base = smoothness_loss(disp, image, SmoothnessConfig(order=1, edge_aware=True))
        smoothed = smoothness_loss(
            disp, image, SmoothnessConfig(order=1, edge_aware=True, gaussian_sigma=1e-3)
        )
        assert smoothed == pytest.approx(base, abs=1e-6)

    def test_weight_scales_linearly(self, rng):
        disp = DisparityMap(rng.random((6, 6)))
        one = smoothness_loss(disp, None, SmoothnessConfig(order=1, edge_aware=False, weight=1.0))
        three = smoothness_loss(disp, None, SmoothnessConfig(order=1, edge_aware=False, weight=3.0))
        assert three == pytest.approx(3.0 * one, rel=1e-12)

    def test_zero_mean_disparity_rejected(self):
        with pytest.raises(ValueError):
            smoothness_loss(DisparityMap(np.zeros((4, 4))), None,
                            SmoothnessConfig(edge_aware=False))


class TestOcclusion:
    def test_empty_scene_background_zero(self):
        assert occlusion_loss(DisparityMap(np.zeros((4, 4))), "background") == 0.0

    def test_hand_values(self):
        disp = DisparityMap(np.full((4, 4), 0.25))
        assert occlusion_loss(disp, "background") == pytest.approx(0.25, rel=1e-15)
        assert occlusion_loss(disp, "foreground") == pytest.approx(0.75, rel=1e-15)

    def test_variants_sum_to_one(self, rng):
        disp = DisparityMap(rng.random((7, 7)))
        total = occlusion_loss(disp, "background") + occlusion_loss(disp, "foreground")
        assert total == pytest.approx(1.0, rel=1e-12)

    def test_background_linear_in_disparity(self, rng):
        vals = rng.random((5, 5)) * 0.5
        a = occlusion_loss(DisparityMap(vals), "background")
        b = occlusion_loss(DisparityMap(2.0 * vals), "background")
        assert b == pytest.approx(2.0 * a, rel=1e-12)


class TestExplainabilityReg:
    def test_all_ones_is_zero(self):
        assert explainability_reg(PredictiveMask("explainability", np.ones((4, 4)))) == 0.0

    def test_inverse_e_gives_one(self):
        mask = PredictiveMask("explainability", np.full((3, 3), 1.0 / np.e))
        assert explainability_reg(mask) == pytest.approx(1.0, rel=1e-12)

    def test_strictly_decreasing_in_mask_value(self):
        low = explainability_reg(PredictiveMask("explainability", np.full((2, 2), 0.3)))
        high = explainability_reg(PredictiveMask("explainability", np.full((2, 2), 0.6)))
        assert low > high

    def test_zero_values_floored(self):
        mask = PredictiveMask("explainability", np.zeros((2, 2)))
        value = explainability_reg(mask)
        assert np.isfinite(value) and value == pytest.approx(-np.log(1e-7), rel=1e-12)

    def test_uncertainty_mask_rejected(self):
        with pytest.raises(ValueError):
            explainability_reg(PredictiveMask("uncertainty", np.zeros((2, 2))))
