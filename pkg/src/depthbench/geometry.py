"""Pinhole camera geometry: depth parameterization, rigid transforms,
backprojection, reprojection and bilinear warping.

Conventions: pixel coordinates are (u, v) with u = column, v = row and the
origin at the top-left pixel center. The camera frame is x-right, y-down,
z-forward. All operations are pure and leave their inputs untouched.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels

# points closer than this behind/at the camera plane are unusable
BEHIND_CAMERA_EPS = 1e-6

_ROTATION_TOL = 1e-9


@dataclass(frozen=True)
class Intrinsics:
    """Pinhole projection parameters, in pixels."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")

    def matrix(self):
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )


@dataclass(frozen=True)
class DepthRange:
    """Metric depth interval that the unit disparity range maps onto."""

    d_min: float = 0.1
    d_max: float = 100.0

    def __post_init__(self):
        if not (0.0 < self.d_min < self.d_max):
            raise ValueError("need 0 < d_min < d_max")

    @property
    def disp_scale(self):
        return 1.0 / self.d_min - 1.0 / self.d_max

    @property
    def disp_shift(self):
        return 1.0 / self.d_max


class RigidTransform:
    """SE(3) pose: 3x3 rotation plus translation in meters."""

    __slots__ = ("rotation", "translation")

    def __init__(self, rotation, translation):
        rot = np.asarray(rotation, dtype=np.float64)
        t = np.asarray(translation, dtype=np.float64).reshape(3)
        if rot.shape != (3, 3):
            raise ValueError("rotation must be 3x3")
        if np.abs(rot.T @ rot - np.eye(3)).max() > _ROTATION_TOL:
            raise ValueError("rotation is not orthonormal")
        if abs(np.linalg.det(rot) - 1.0) > _ROTATION_TOL:
            raise ValueError("rotation determinant must be +1")
        self.rotation = rot
        self.translation = t

    @classmethod
    def identity(cls):
        return cls(np.eye(3), np.zeros(3))

    def apply(self, points):
        """Transform an (N, 3) array of points."""
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.rotation.T + self.translation

    def inverse(self):
        return RigidTransform(self.rotation.T, -self.rotation.T @ self.translation)


def axis_angle_to_transform(rot_vec, translation=(0.0, 0.0, 0.0)):
    """Rodrigues conversion: |rot_vec| is the angle, its direction the axis."""
    r = np.asarray(rot_vec, dtype=np.float64).reshape(3)
    theta = float(np.linalg.norm(r))
    k = np.array(
        [[0.0, -r[2], r[1]], [r[2], 0.0, -r[0]], [-r[1], r[0], 0.0]]
    )
    if theta < 1e-8:
        # second-order series, exact to O(theta^3)
        rot = np.eye(3) + k + 0.5 * (k @ k)
    else:
        k /= theta
        rot = (
            np.eye(3)
            + np.sin(theta) * k
            + (1.0 - np.cos(theta)) * (k @ k)
        )
    return RigidTransform(rot, translation)


class DisparityMap:
    """2D grid of unitless sigmoid disparities in [0, 1]."""

    __slots__ = ("values",)

    def __init__(self, values):
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError("disparity grid must be 2D")
        if not np.isfinite(vals).all():
            raise ValueError("disparity values must be finite")
        if vals.min() < -1e-6 or vals.max() > 1.0 + 1e-6:
            raise ValueError("disparity values must lie in [0, 1]")
        self.values = np.clip(vals, 0.0, 1.0)

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def height(self):
        return self.values.shape[0]


class DepthMap:
    """2D metric depth grid with a validity mask.

    Valid pixels carry finite, strictly positive depth; invalid pixels are
    excluded from every metric and loss.
    """

    __slots__ = ("values", "valid")

    def __init__(self, values, valid=None):
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError("depth grid must be 2D")
        if valid is None:
            valid = np.isfinite(vals) & (vals > 0.0)
        else:
            valid = np.asarray(valid, dtype=bool)
            if valid.shape != vals.shape:
                raise ValueError("validity mask shape mismatch")
            picked = vals[valid]
            if picked.size and not (np.isfinite(picked).all() and (picked > 0.0).all()):
                raise ValueError("valid pixels must carry finite positive depth")
        self.values = vals
        self.valid = valid

    @property
    def width(self):
        return self.values.shape[1]

    @property
    def height(self):
        return self.values.shape[0]

    @property
    def n_valid(self):
        return int(self.valid.sum())


class PointCloud:
    """Set of 3D points in the camera frame, meters."""

    __slots__ = ("points",)

    def __init__(self, points):
        pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        if pts.size and not np.isfinite(pts).all():
            raise ValueError("pointcloud contains non-finite coordinates")
        self.points = pts

    def __len__(self):
        return self.points.shape[0]


def disp_to_depth(disp: DisparityMap, depth_range: DepthRange = DepthRange()) -> DepthMap:
    """Map sigmoid disparity onto [d_min, d_max]: D = 1 / (a*sigma + b).

    b = 1/d_max and a = 1/d_min - 1/d_max, so disparity 0 lands exactly on
    d_max and disparity 1 exactly on d_min.
    """
    a = depth_range.disp_scale
    b = depth_range.disp_shift
    depth = 1.0 / (a * disp.values + b)
    return DepthMap(depth, np.ones_like(depth, dtype=bool))


def backproject(depth: DepthMap, intrinsics: Intrinsics) -> PointCloud:
    """Lift every valid pixel to 3D: X = D(p) * K^-1 * (u, v, 1)."""
    if (depth.width, depth.height) != (intrinsics.width, intrinsics.height):
        raise ValueError("intrinsics do not match the depth map size")
    vs, us = np.nonzero(depth.valid)
    d = depth.values[vs, us]
    x = (us - intrinsics.cx) / intrinsics.fx * d
    y = (vs - intrinsics.cy) / intrinsics.fy * d
    return PointCloud(np.stack([x, y, d], axis=-1))


def project(points: PointCloud, intrinsics: Intrinsics):
    """Project camera-frame points to pixel coordinates.

    Returns (coords (N, 2), in_front (N,)). Points with z below the
    behind-camera epsilon get coordinates (-1, -1) and a False flag.
    """
    pts = points.points
    z = pts[:, 2]
    in_front = z > BEHIND_CAMERA_EPS
    safe_z = np.where(in_front, z, 1.0)
    u = intrinsics.fx * pts[:, 0] / safe_z + intrinsics.cx
    v = intrinsics.fy * pts[:, 1] / safe_z + intrinsics.cy
    coords = np.stack([u, v], axis=-1)
    coords[~in_front] = -1.0
    return coords, in_front


def reproject(pix, depth_at_pix, intrinsics: Intrinsics, transform: RigidTransform):
    """Reproject pixels into another view: p_hat = K * T * (D(p) * K^-1 * p).

    ``pix`` is an (..., 2) array of (u, v) coordinates and ``depth_at_pix``
    the matching depths. Returns (coords (..., 2), projected_depth (...),
    in_front (...)); behind-camera points (z <= 1e-6 after the transform)
    are flagged and their coordinates set to (-1, -1).
    """
    pix = np.asarray(pix, dtype=np.float64)
    d = np.asarray(depth_at_pix, dtype=np.float64)
    shape = d.shape
    uv = pix.reshape(-1, 2)
    dd = d.reshape(-1)
    x = (uv[:, 0] - intrinsics.cx) / intrinsics.fx * dd
    y = (uv[:, 1] - intrinsics.cy) / intrinsics.fy * dd
    pts = np.stack([x, y, dd], axis=-1)
    moved = transform.apply(pts)
    coords, in_front = project(PointCloud(moved), intrinsics)
    return (
        coords.reshape(shape + (2,)),
        moved[:, 2].reshape(shape),
        in_front.reshape(shape),
    )


def bilinear_sample(image, coords):
    """Bilinearly interpolate ``image`` at continuous (u, v) coordinates.

    ``image`` is (H, W) or (H, W, C); ``coords`` is (..., 2). Samples
    outside [0, W-1] x [0, H-1] are masked invalid, not clamped. Returns
    (values, in_bounds) with the leading shape of ``coords``.
    """
    img = np.asarray(image, dtype=np.float64)
    coords = np.asarray(coords, dtype=np.float64)
    if not np.isfinite(coords).all():
        raise ValueError("sampling coordinates must be finite")
    squeeze = img.ndim == 2
    if squeeze:
        img = img[:, :, None]
    lead = coords.shape[:-1]
    flat = coords.reshape(-1, 2)
    values, inb = _kernels.bilinear_gather(img, flat[:, 0], flat[:, 1])
    values = values.reshape(lead + (img.shape[2],))
    if squeeze:
        values = values[..., 0]
    return values, inb.reshape(lead)


def warp_field(target_depth: DepthMap, intrinsics: Intrinsics, transform: RigidTransform):
    """Dense correspondence field from the target view into a support view.

    Returns (coords (H, W, 2), valid (H, W)) where valid pixels have known
    target depth and land in front of the support camera.
    """
    h, w = target_depth.values.shape
    us, vs = np.meshgrid(np.arange(w, dtype=np.float64), np.arange(h, dtype=np.float64))
    pix = np.stack([us, vs], axis=-1)
    coords, _, in_front = reproject(pix, target_depth.values, intrinsics, transform)
    return coords, target_depth.valid & in_front


def synthesize_view(target_depth: DepthMap, support_image, intrinsics: Intrinsics,
                    transform: RigidTransform):
    """Warp a support image into the target view using the target depth.

    Returns (synthesized image, validity mask); a pixel is valid when its
    target depth is known, it reprojects in front of the support camera and
    the sample lands inside the support image.
    """
    support = np.asarray(support_image, dtype=np.float64)
    if support.shape[:2] != target_depth.values.shape:
        raise ValueError("support image size does not match the target depth")
    coords, geom_valid = warp_field(target_depth, intrinsics, transform)
    values, in_bounds = bilinear_sample(support, coords)
    return values, geom_valid & in_bounds
