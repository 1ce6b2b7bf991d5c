"""Synthetic scenes with closed-form depth and known boundary locations.

Renders use float32 arithmetic in a fixed order so fixtures are identical
across platforms.
"""

from dataclasses import dataclass

import numpy as np

from depthbench.geometry import DepthMap, Intrinsics


@dataclass(frozen=True)
class Boundaries:
    """Analytic depth-boundary locations.

    Seams sit between pixel indices, so a vertical seam 'after column c'
    has coordinate c + 0.5.
    """

    seam_cols: tuple = ()
    seam_rows: tuple = ()

    def mask(self, shape, tol=0.5):
        """Pixels within ``tol`` of any seam."""
        h, w = shape
        out = np.zeros(shape, dtype=bool)
        cols = np.arange(w, dtype=np.float64)
        rows = np.arange(h, dtype=np.float64)
        for seam in self.seam_cols:
            out |= (np.abs(cols - seam) <= tol)[None, :]
        for seam in self.seam_rows:
            out |= (np.abs(rows - seam) <= tol)[:, None]
        return out


@dataclass(frozen=True)
class ConstantScene:
    """Fronto-parallel plane at a fixed depth."""

    depth: float = 5.0

    def render(self, width, height):
        grid = np.full((height, width), np.float32(self.depth), dtype=np.float32)
        return grid, Boundaries()


@dataclass(frozen=True)
class StepScene:
    """Two half-planes split at a pixel index.

    ``seam`` is the first column (or row) of the far half, so the
    boundary coordinate is seam - 0.5.
    """

    near: float = 1.0
    far: float = 10.0
    seam: int = 8
    axis: str = "vertical"

    def render(self, width, height):
        grid = np.empty((height, width), dtype=np.float32)
        if self.axis == "vertical":
            grid[:, : self.seam] = np.float32(self.near)
            grid[:, self.seam :] = np.float32(self.far)
            return grid, Boundaries(seam_cols=(self.seam - 0.5,))
        if self.axis == "horizontal":
            grid[: self.seam, :] = np.float32(self.near)
            grid[self.seam :, :] = np.float32(self.far)
            return grid, Boundaries(seam_rows=(self.seam - 0.5,))
        raise ValueError("axis must be 'vertical' or 'horizontal'")


@dataclass(frozen=True)
class RampScene:
    """Depth varying linearly across columns (no discontinuity)."""

    d0: float = 2.0
    d1: float = 20.0

    def render(self, width, height):
        ramp = np.linspace(np.float32(self.d0), np.float32(self.d1), width,
                           dtype=np.float32)
        return np.repeat(ramp[None, :], height, axis=0), Boundaries()


@dataclass(frozen=True)
class SlantedPlaneScene:
    """Plane n . X = offset intersected with the camera rays.

    Closed form per pixel: z = offset / (n . K^-1 (u, v, 1)); the normal
    must keep every pixel's denominator positive.
    """

    normal: tuple = (0.1, 0.0, 1.0)
    offset: float = 5.0

    def depth_at(self, u, v, k: Intrinsics):
        x = (u - k.cx) / k.fx
        y = (v - k.cy) / k.fy
        denom = self.normal[0] * x + self.normal[1] * y + self.normal[2]
        return self.offset / denom

    def render_with_intrinsics(self, k: Intrinsics):
        grid = np.empty((k.height, k.width), dtype=np.float32)
        for v in range(k.height):
            for u in range(k.width):
                grid[v, u] = np.float32(self.depth_at(float(u), float(v), k))
        return grid, Boundaries()


def render_scene(scene, intrinsics: Intrinsics):
    """Render a scene to a DepthMap plus its analytic boundaries."""
    if isinstance(scene, SlantedPlaneScene):
        grid, boundaries = scene.render_with_intrinsics(intrinsics)
    else:
        grid, boundaries = scene.render(intrinsics.width, intrinsics.height)
    values = grid.astype(np.float64)
    if (values <= 0).any():
        raise ValueError("scene rendered nonpositive depth")
    return DepthMap(values), boundaries
