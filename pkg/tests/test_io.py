import numpy as np
import pytest

from depthbench.geometry import DepthMap
from depthbench.io import (
    load_depth_any,
    load_depth_png16,
    load_float_map,
    load_image,
    load_sky_mask,
    save_depth_png16,
    save_float_map,
    save_image_png,
    save_sky_mask,
)


class TestFloatMap:
    def test_direct_decode(self, tmp_path):
        path = tmp_path / "grid.fmap"
        save_float_map(path, np.array([[1.0, 2.0], [3.0, 4.0]]))
        grid = load_float_map(path)
        assert grid.dtype == np.float32
        assert np.array_equal(grid, np.array([[1, 2], [3, 4]], dtype=np.float32))

    def test_round_trip_bit_exact(self, tmp_path, rng):
        grid = rng.normal(size=(13, 7)).astype(np.float32)
        grid[2, 3] = np.nan
        path = tmp_path / "grid.fmap"
        save_float_map(path, grid)
        loaded = load_float_map(path)
        assert np.array_equal(loaded.view(np.uint32), grid.view(np.uint32))

    def test_nan_becomes_invalid_depth(self, tmp_path):
        grid = np.array([[1.0, np.nan], [0.5, 2.0]], dtype=np.float32)
        path = tmp_path / "d.fmap"
        save_float_map(path, grid)
        depth = load_depth_any(path)
        assert list(depth.valid.ravel()) == [True, False, True, True]

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "bad.fmap"
        path.write_bytes(b"NOPE1\n2 2\n" + b"\x00" * 16)
        with pytest.raises(ValueError):
            load_float_map(path)

    def test_truncated_payload_rejected(self, tmp_path):
        path = tmp_path / "short.fmap"
        path.write_bytes(b"FMAP1\n2 2\n" + b"\x00" * 8)
        with pytest.raises(ValueError):
            load_float_map(path)


class TestDepthPng16:
    def test_conversion_constant(self, tmp_path):
        depth = DepthMap(np.full((4, 4), 20.0))
        path = tmp_path / "d.png"
        save_depth_png16(path, depth)
        loaded = load_depth_png16(path)
        # 20.0 m -> raw 5120 -> 20.0 m
        assert np.array_equal(loaded.values, depth.values)
        assert loaded.valid.all()

    def test_zero_raw_is_invalid(self, tmp_path):
        vals = np.array([[20.0, 0.0]])
        depth = DepthMap(vals, np.array([[True, False]]))
        path = tmp_path / "d.png"
        save_depth_png16(path, depth)
        loaded = load_depth_png16(path)
        assert list(loaded.valid[0]) == [True, False]

    def test_max_raw_value(self, tmp_path):
        depth = DepthMap(np.full((2, 2), 65535 / 256.0))
        path = tmp_path / "d.png"
        save_depth_png16(path, depth)
        loaded = load_depth_png16(path)
        assert loaded.values[0, 0] == 65535 / 256.0  # 255.996..., still valid
        assert loaded.valid.all()

    def test_quantization_round_trip(self, tmp_path, rng):
        vals = rng.uniform(0.5, 200.0, (8, 8))
        path = tmp_path / "d.png"
        save_depth_png16(path, DepthMap(vals))
        loaded = load_depth_png16(path)
        assert np.abs(loaded.values - vals).max() <= 0.5 / 256.0 + 1e-12

    def test_rejects_8bit_png(self, tmp_path):
        save_image_png(tmp_path / "rgb.png", np.zeros((4, 4, 3)))
        with pytest.raises(ValueError):
            load_depth_png16(tmp_path / "rgb.png")


def test_sky_mask_round_trip(tmp_path, rng):
    mask = rng.random((6, 8)) < 0.4
    path = tmp_path / "sky.png"
    save_sky_mask(path, mask)
    assert np.array_equal(load_sky_mask(path), mask)


def test_image_round_trip(tmp_path, rng):
    image = rng.random((5, 7, 3))
    path = tmp_path / "img.png"
    save_image_png(path, image)
    loaded = load_image(path)
    assert loaded.shape == (5, 7, 3)
    assert np.abs(loaded - image).max() <= 0.5 / 255.0 + 1e-12
