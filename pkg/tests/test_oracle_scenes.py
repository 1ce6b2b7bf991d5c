import numpy as np
import pytest

from depthbench_oracle.scenes import (
    ConstantScene,
    RampScene,
    SlantedPlaneScene,
    StepScene,
    render_scene,
)

from conftest import make_intrinsics


def test_constant_scene():
    depth, boundaries = render_scene(ConstantScene(5.0), make_intrinsics(8, 6))
    assert (depth.values == 5.0).all()
    assert not boundaries.mask((6, 8)).any()


def test_step_scene_boundary_location():
    depth, boundaries = render_scene(StepScene(1.0, 10.0, seam=4), make_intrinsics(8, 6))
    assert (depth.values[:, :4] == 1.0).all()
    assert (depth.values[:, 4:] == 10.0).all()
    assert boundaries.seam_cols == (3.5,)
    mask = boundaries.mask((6, 8), tol=0.5)
    assert mask[:, 3].all() and mask[:, 4].all()
    assert not mask[:, 2].any() and not mask[:, 5].any()


def test_ramp_scene_is_linear():
    depth, boundaries = render_scene(RampScene(2.0, 20.0), make_intrinsics(10, 4))
    row = depth.values[0]
    diffs = np.diff(row)
    assert np.allclose(diffs, diffs[0], rtol=1e-6)
    assert row[0] == 2.0 and row[-1] == 20.0
    assert not boundaries.mask((4, 10)).any()


def test_slanted_plane_matches_closed_form():
    k = make_intrinsics(12, 9, fx=15.0, fy=15.0)
    scene = SlantedPlaneScene(normal=(0.2, 0.1, 1.0), offset=6.0)
    depth, _ = render_scene(scene, k)
    # closed-form plane-ray intersection at a few probe pixels
    for u, v in ((0, 0), (5, 4), (11, 8)):
        x = (u - k.cx) / k.fx
        y = (v - k.cy) / k.fy
        expected = 6.0 / (0.2 * x + 0.1 * y + 1.0)
        assert depth.values[v, u] == pytest.approx(expected, rel=1e-6)


def test_renders_are_deterministic():
    k = make_intrinsics(16, 16)
    a, _ = render_scene(StepScene(1.0, 10.0, seam=8), k)
    b, _ = render_scene(StepScene(1.0, 10.0, seam=8), k)
    assert np.array_equal(a.values, b.values)
