import math

import numpy as np
import pytest

from depthbench.geometry import (
    BEHIND_CAMERA_EPS,
    DepthMap,
    DepthRange,
    DisparityMap,
    Intrinsics,
    PointCloud,
    RigidTransform,
    axis_angle_to_transform,
    backproject,
    bilinear_sample,
    disp_to_depth,
    project,
    reproject,
    synthesize_view,
)

from conftest import make_intrinsics


class TestDispToDepth:
    def test_endpoints_exact(self):
        disp = DisparityMap(np.array([[0.0, 1.0]]))
        depth = disp_to_depth(disp, DepthRange(0.1, 100.0))
        assert depth.values[0, 0] == 100.0
        assert depth.values[0, 1] == 0.1

    def test_midpoint_hand_value(self):
        # a = 1/0.1 - 1/100 = 9.99, b = 0.01 -> 1 / (9.99*0.5 + 0.01)
        depth = disp_to_depth(DisparityMap(np.array([[0.5]])), DepthRange(0.1, 100.0))
        assert depth.values[0, 0] == pytest.approx(1.0 / 5.005, rel=1e-15)

    def test_monotone_decreasing_and_in_range(self, rng):
        sigma = np.sort(rng.random(64))
        depth = disp_to_depth(DisparityMap(sigma[None, :]), DepthRange(0.1, 100.0))
        vals = depth.values[0]
        assert (np.diff(vals) <= 0).all()
        assert vals.min() >= 0.1 - 1e-12 and vals.max() <= 100.0 + 1e-12
        assert depth.valid.all()

    def test_rejects_out_of_range_disparity(self):
        with pytest.raises(ValueError):
            DisparityMap(np.array([[1.5]]))
        with pytest.raises(ValueError):
            DisparityMap(np.array([[-0.1]]))


class TestAxisAngle:
    def test_zero_vector_is_identity(self):
        t = axis_angle_to_transform((0.0, 0.0, 0.0))
        assert np.allclose(t.rotation, np.eye(3), atol=1e-15)
        assert np.allclose(t.translation, 0.0)

    def test_quarter_turn_about_z_maps_x_to_y(self):
        t = axis_angle_to_transform((0.0, 0.0, math.pi / 2))
        rotated = t.apply(np.array([[1.0, 0.0, 0.0]]))
        assert np.allclose(rotated, [[0.0, 1.0, 0.0]], atol=1e-12)

    def test_random_vectors_give_valid_rotations(self, rng):
        for _ in range(100):
            vec = rng.normal(size=3) * rng.uniform(0.0, 4.0)
            t = axis_angle_to_transform(vec, rng.normal(size=3))
            assert np.abs(t.rotation.T @ t.rotation - np.eye(3)).max() <= 1e-9
            assert abs(np.linalg.det(t.rotation) - 1.0) <= 1e-9

    def test_small_angle_series(self):
        t = axis_angle_to_transform((1e-10, -2e-10, 5e-11))
        assert np.abs(t.rotation.T @ t.rotation - np.eye(3)).max() <= 1e-12


class TestBackproject:
    def test_unit_intrinsics_hand_value(self):
        k = Intrinsics(1.0, 1.0, 0.0, 0.0, 2, 2)
        depth = DepthMap(np.full((2, 2), 2.0))
        cloud = backproject(depth, k)
        assert np.allclose(cloud.points[0], [0.0, 0.0, 2.0])

    def test_empty_depth_gives_empty_cloud(self):
        k = make_intrinsics(4, 4)
        depth = DepthMap(np.zeros((4, 4)), np.zeros((4, 4), dtype=bool))
        assert len(backproject(depth, k)) == 0

    def test_principal_ray(self):
        k = Intrinsics(50.0, 50.0, 3.0, 2.0, 8, 8)
        vals = np.zeros((8, 8))
        valid = np.zeros((8, 8), dtype=bool)
        vals[2, 3] = 7.5  # pixel (u=3, v=2) = principal point
        valid[2, 3] = True
        cloud = backproject(DepthMap(vals, valid), k)
        assert np.allclose(cloud.points, [[0.0, 0.0, 7.5]])

    def test_project_backproject_round_trip(self, rng):
        k = make_intrinsics(16, 12, fx=35.0, fy=28.0)
        depth = DepthMap(rng.uniform(0.5, 50.0, size=(12, 16)))
        cloud = backproject(depth, k)
        coords, in_front = project(cloud, k)
        assert in_front.all()
        vs, us = np.nonzero(depth.valid)
        expected = np.stack([us, vs], axis=-1).astype(float)
        assert np.abs(coords - expected).max() <= 1e-6


class TestReproject:
    def test_identity_is_pixel_identity(self, rng):
        k = make_intrinsics(32, 24)
        pix = np.stack(np.meshgrid(np.arange(32.0), np.arange(24.0)), axis=-1)
        depth = rng.uniform(0.1, 90.0, size=(24, 32))
        coords, z, in_front = reproject(pix, depth, k, RigidTransform.identity())
        assert in_front.all()
        assert np.abs(coords - pix).max() <= 1e-9
        assert np.allclose(z, depth)

    def test_pure_translation_hand_value(self):
        k = Intrinsics(1.0, 1.0, 0.0, 0.0, 4, 4)
        t = RigidTransform(np.eye(3), [1.0, 0.0, 0.0])
        coords, z, in_front = reproject(np.array([0.0, 0.0]), 2.0, k, t)
        assert in_front
        assert np.allclose(coords, [0.5, 0.0])
        assert z == 2.0

    def test_behind_camera_flagged(self):
        k = Intrinsics(1.0, 1.0, 0.0, 0.0, 4, 4)
        t = RigidTransform(np.eye(3), [0.0, 0.0, -2.0])
        _, z, in_front = reproject(np.array([0.0, 0.0]), 2.0, k, t)
        assert not in_front
        assert z <= BEHIND_CAMERA_EPS


class TestBilinearSample:
    def test_hand_value_four_neighbor_average(self):
        image = np.array([[0.0, 1.0], [2.0, 3.0]])
        values, inb = bilinear_sample(image, np.array([0.5, 0.5]))
        assert inb
        assert values == 1.5

    def test_out_of_bounds_masked(self):
        image = np.array([[0.0, 1.0], [2.0, 3.0]])
        _, inb = bilinear_sample(image, np.array([-1.0, 0.0]))
        assert not inb

    def test_linear_along_each_axis(self, rng):
        image = rng.random((6, 7))

        def oracle(u, v):
            x0, y0 = int(np.floor(u)), int(np.floor(v))
            x1, y1 = min(x0 + 1, 6), min(y0 + 1, 5)
            tx, ty = u - x0, v - y0
            top = image[y0, x0] * (1 - tx) + image[y0, x1] * tx
            bot = image[y1, x0] * (1 - tx) + image[y1, x1] * tx
            return top * (1 - ty) + bot * ty

        for _ in range(200):
            u = rng.uniform(0, 6.0)
            v = rng.uniform(0, 5.0)
            values, inb = bilinear_sample(image, np.array([u, v]))
            assert inb
            assert values == pytest.approx(oracle(u, v), abs=1e-12)


def warp_oracle(target_depth, support, k, transform):
    """Scalar-loop view synthesis used as the independent reference."""
    h, w = target_depth.values.shape
    synth = np.zeros((h, w))
    valid = np.zeros((h, w), dtype=bool)
    r, t = transform.rotation, transform.translation
    for v in range(h):
        for u in range(w):
            if not target_depth.valid[v, u]:
                continue
            d = target_depth.values[v, u]
            point = np.array([(u - k.cx) / k.fx * d, (v - k.cy) / k.fy * d, d])
            moved = r @ point + t
            if moved[2] <= BEHIND_CAMERA_EPS:
                continue
            uu = k.fx * moved[0] / moved[2] + k.cx
            vv = k.fy * moved[1] / moved[2] + k.cy
            if not (0 <= uu <= w - 1 and 0 <= vv <= h - 1):
                continue
            x0, y0 = int(np.floor(uu)), int(np.floor(vv))
            x1, y1 = min(x0 + 1, w - 1), min(y0 + 1, h - 1)
            tx, ty = uu - x0, vv - y0
            top = support[y0, x0] * (1 - tx) + support[y0, x1] * tx
            bot = support[y1, x0] * (1 - tx) + support[y1, x1] * tx
            synth[v, u] = top * (1 - ty) + bot * ty
            valid[v, u] = True
    return synth, valid


class TestSynthesizeView:
    def test_identity_returns_support(self, rng):
        k = make_intrinsics(8, 8)
        depth = DepthMap(rng.uniform(1.0, 20.0, size=(8, 8)))
        support = rng.random((8, 8))
        synth, valid = synthesize_view(depth, support, k, RigidTransform.identity())
        assert valid.all()
        assert np.abs(synth - support).max() <= 1e-9

    def test_planar_scene_matches_warp_oracle(self, rng):
        k = make_intrinsics(8, 8, fx=4.0, fy=4.0)
        depth = DepthMap(np.full((8, 8), 5.0))
        support = rng.random((8, 8))
        for translation in ([0.3, 0.0, 0.0], [0.0, -0.4, 0.1], [0.2, 0.1, -0.3]):
            t = RigidTransform(np.eye(3), translation)
            synth, valid = synthesize_view(depth, support, k, t)
            ref, ref_valid = warp_oracle(depth, support, k, t)
            assert np.array_equal(valid, ref_valid)
            assert np.abs(synth[valid] - ref[valid]).max() <= 1e-6

    def test_translation_equals_integer_shift(self, rng):
        # constant depth + x-translation shifts by fx * t / d pixels
        k = make_intrinsics(8, 8, fx=4.0, fy=4.0)
        d, shift = 5.0, 2
        t = RigidTransform(np.eye(3), [shift * d / k.fx, 0.0, 0.0])
        depth = DepthMap(np.full((8, 8), d))
        support = rng.random((8, 8))
        synth, valid = synthesize_view(depth, support, k, t)
        assert valid[:, : 8 - shift].all()
        assert not valid[:, 8 - shift :].any()
        assert np.abs(synth[:, : 8 - shift] - support[:, shift:]).max() <= 1e-9

    def test_all_out_of_bounds_gives_empty_mask(self):
        k = make_intrinsics(4, 4)
        depth = DepthMap(np.full((4, 4), 1.0))
        t = RigidTransform(np.eye(3), [100.0, 0.0, 0.0])
        _, valid = synthesize_view(depth, np.zeros((4, 4)), k, t)
        assert not valid.any()


def test_pointcloud_rejects_non_finite():
    with pytest.raises(ValueError):
        PointCloud(np.array([[0.0, 0.0, np.nan]]))


def test_rigid_transform_rejects_non_orthonormal():
    with pytest.raises(ValueError):
        RigidTransform(np.eye(3) * 1.001, np.zeros(3))
