"""Perspective patch extraction from equirectangular panoramas.

Patches are sampled at fixed azimuth steps and constant elevation by
casting virtual pinhole rays, rotating them into the panorama frame and
bilinearly sampling the image (with horizontal wrap-around). Depth is
resampled with nearest-neighbour lookups (bilinear blending across depth
boundaries would create phantom surfaces) and converted from radial
distance to perspective z-depth.

Panorama convention: azimuth 0 / elevation 0 looks at column W/2, row H/2;
longitude grows to the right, latitude +90 degrees is row 0.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import DepthMap, Intrinsics


@dataclass(frozen=True)
class Panorama:
    """Equirectangular image plus aligned depth (meters) and validity."""

    image: np.ndarray
    depth: np.ndarray
    valid: np.ndarray = None

    def __post_init__(self):
        image = np.asarray(self.image, dtype=np.float64)
        depth = np.asarray(self.depth, dtype=np.float64)
        if depth.ndim != 2 or image.shape[:2] != depth.shape:
            raise ValueError("panorama image and depth sizes do not match")
        if depth.shape[1] != 2 * depth.shape[0]:
            raise ValueError("full-sphere panoramas need width = 2 * height")
        valid = self.valid
        if valid is None:
            valid = np.isfinite(depth) & (depth > 0.0)
        else:
            valid = np.asarray(valid, dtype=bool)
            if valid.shape != depth.shape:
                raise ValueError("validity grid shape mismatch")
        object.__setattr__(self, "image", image)
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "valid", valid)

    @property
    def width(self):
        return self.depth.shape[1]

    @property
    def height(self):
        return self.depth.shape[0]


@dataclass(frozen=True)
class PatchSpec:
    """Virtual pinhole camera for one patch.

    The default geometry matches the 1242x376 automotive-benchmark frame;
    the focal length is a configurable engineering choice.
    """

    azimuth: float
    elevation: float = 0.0
    out_width: int = 1242
    out_height: int = 376
    fx: float = 721.5
    fy: float = 721.5
    cx: float = 620.5
    cy: float = 187.5

    def intrinsics(self) -> Intrinsics:
        return Intrinsics(self.fx, self.fy, self.cx, self.cy,
                          self.out_width, self.out_height)


def direction_to_equirect(dirs, pano_width, pano_height):
    """Map unit direction vectors to continuous panorama (col, row).

    The forward axis (azimuth 0, elevation 0) maps to (W/2, H/2); azimuth
    grows linearly with the column. At the poles the column is degenerate
    and arbitrary.
    """
    d = np.asarray(dirs, dtype=np.float64)
    norms = np.sqrt((d * d).sum(axis=-1))
    if not np.allclose(norms, 1.0, atol=1e-9):
        raise ValueError("directions must be unit vectors")
    lon = np.arctan2(d[..., 0], d[..., 2])
    lat = np.arcsin(np.clip(-d[..., 1], -1.0, 1.0))
    col = (lon / (2.0 * np.pi) + 0.5) * pano_width
    row = (0.5 - lat / np.pi) * pano_height
    return col, row


def _rotation_for(spec: PatchSpec):
    az = np.deg2rad(spec.azimuth)
    el = np.deg2rad(spec.elevation)
    ca, sa = np.cos(az), np.sin(az)
    ce, se = np.cos(el), np.sin(el)
    r_y = np.array([[ca, 0.0, sa], [0.0, 1.0, 0.0], [-sa, 0.0, ca]])
    r_x = np.array([[1.0, 0.0, 0.0], [0.0, ce, -se], [0.0, se, ce]])
    return r_y @ r_x


def _wrap_bilinear(image, col, row):
    # horizontal wrap-around, vertical clamp
    img = image if image.ndim == 3 else image[:, :, None]
    h, w = img.shape[:2]
    c0 = np.floor(col)
    r0 = np.floor(row)
    tc = (col - c0)[..., None]
    tr = (row - r0)[..., None]
    c0 = c0.astype(np.int64) % w
    c1 = (c0 + 1) % w
    r0 = np.clip(r0.astype(np.int64), 0, h - 1)
    r1 = np.minimum(r0 + 1, h - 1)
    top = img[r0, c0] * (1.0 - tc) + img[r0, c1] * tc
    bot = img[r1, c0] * (1.0 - tc) + img[r1, c1] * tc
    out = top * (1.0 - tr) + bot * tr
    return out if image.ndim == 3 else out[..., 0]


def _wrap_nearest_indices(col, row, w, h):
    ci = np.floor(col + 0.5).astype(np.int64) % w
    ri = np.clip(np.floor(row + 0.5).astype(np.int64), 0, h - 1)
    return ci, ri


def sample_patch(pano: Panorama, spec: PatchSpec, radial_depth=True):
    """Extract one undistorted perspective patch (image plus depth).

    Rays go through K^-1, get rotated by elevation then azimuth, and land
    on the panorama via the equirectangular mapping. With
    ``radial_depth`` the panorama depth is treated as distance along the
    ray and converted to perspective z-depth (z = r * cos of the angle to
    the optical axis); otherwise the sampled value is used as z directly.
    Invalid panorama depth propagates to the patch.
    """
    k = spec.intrinsics()
    us, vs = np.meshgrid(
        np.arange(spec.out_width, dtype=np.float64),
        np.arange(spec.out_height, dtype=np.float64),
    )
    x = (us - k.cx) / k.fx
    y = (vs - k.cy) / k.fy
    rays = np.stack([x, y, np.ones_like(x)], axis=-1)
    norms = np.sqrt((rays * rays).sum(axis=-1))
    dirs = (rays / norms[..., None]) @ _rotation_for(spec).T

    col, row = direction_to_equirect(dirs, pano.width, pano.height)
    patch_image = _wrap_bilinear(pano.image, col, row)

    ci, ri = _wrap_nearest_indices(col, row, pano.width, pano.height)
    sampled = pano.depth[ri, ci]
    valid = pano.valid[ri, ci]
    if radial_depth:
        depth_vals = sampled / norms  # r * cos(angle to optical axis)
    else:
        depth_vals = sampled
    valid = valid & np.isfinite(depth_vals) & (depth_vals > 0.0)
    return patch_image, DepthMap(np.where(valid, depth_vals, 0.0), valid)


def generate_scene_patches(pano: Panorama, step=20.0, base_spec: PatchSpec = None,
                           radial_depth=True):
    """Sample patches at azimuths {0, step, ..., 360 - step}.

    ``step`` must divide 360. Returns a list of (image, DepthMap,
    PatchSpec) triples, 360/step of them.
    """
    if step <= 0.0 or (360.0 / step) != int(360.0 / step):
        raise ValueError("step must divide 360 degrees")
    if base_spec is None:
        base_spec = PatchSpec(azimuth=0.0)
    out = []
    for i in range(int(360.0 / step)):
        spec = PatchSpec(
            azimuth=i * step,
            elevation=base_spec.elevation,
            out_width=base_spec.out_width,
            out_height=base_spec.out_height,
            fx=base_spec.fx, fy=base_spec.fy,
            cx=base_spec.cx, cy=base_spec.cy,
        )
        image, depth = sample_patch(pano, spec, radial_depth)
        out.append((image, depth, spec))
    return out
