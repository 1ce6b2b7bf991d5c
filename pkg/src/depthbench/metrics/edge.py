"""Depth-boundary extraction and edge-based metrics.

Boundaries come from Canny edges on the (optionally Gaussian-smoothed)
transformed depth map. Edge components touching invalid-depth regions are
discarded unless those invalid pixels are sky, since depth dropouts create
fake boundaries while sky boundaries are real. Accuracy/completeness are
mean truncated Euclidean distances between the predicted and ground-truth
edge sets.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .. import _kernels
from ..geometry import DepthMap, Intrinsics, PointCloud, backproject
from .image import ImageMetrics, image_metrics
from .pointcloud import DEFAULT_TAU_3D, PointcloudMetrics, pointcloud_metrics

DEFAULT_EDGE_TRUNC = 10.0  # pixels
DEFAULT_EDGE_SIGMA = 1.0
DEFAULT_EDGE_TRANSFORM = "log"

# depth floor fed to the transform for invalid pixels, so dropouts produce
# a strong (removable) gradient at their rim
_DEPTH_FLOOR = 1e-3

# relative hysteresis thresholds, fractions of the max gradient magnitude
_CANNY_LOW = 0.1
_CANNY_HIGH = 0.2

_EIGHT = np.ones((3, 3), dtype=bool)


@dataclass(frozen=True)
class EdgeMap:
    """Binary depth-boundary grid plus extraction provenance."""

    edges: np.ndarray
    transform: str = DEFAULT_EDGE_TRANSFORM
    sigma: float = DEFAULT_EDGE_SIGMA

    def __post_init__(self):
        object.__setattr__(self, "edges", np.asarray(self.edges, dtype=bool))
        if self.edges.ndim != 2:
            raise ValueError("edge grid must be 2D")


@dataclass(frozen=True)
class EdgeMetrics:
    edge_acc: float  # pixels
    edge_comp: float  # pixels

    def as_dict(self):
        return {"EdgeAcc": self.edge_acc, "EdgeComp": self.edge_comp}


def _transform_depth(depth: DepthMap, transform):
    vals = np.maximum(depth.values, _DEPTH_FLOOR)
    vals = np.where(depth.valid, vals, _DEPTH_FLOOR)
    if transform == "raw":
        return vals
    if transform == "log":
        return np.log(vals)
    if transform == "inverse":
        return 1.0 / vals
    raise ValueError("transform must be 'raw', 'log' or 'inverse'")


def _nonmax_suppress(mag, gx, gy, tol):
    # quantize gradient direction into 4 sectors; a pixel survives when it
    # beats the backward neighbour strictly and the forward one weakly
    # (breaks the two-pixel plateau of a symmetric step in favour of the
    # lower-index pixel). Comparisons carry a relative tolerance so exact
    # ties resolve identically under monotone value shifts, which keeps
    # log-transform extraction invariant to depth rescaling.
    angle = np.arctan2(gy, gx)
    sector = np.round(angle / (np.pi / 4.0)).astype(int) % 4
    offsets = {0: (0, 1), 1: (1, 1), 2: (1, 0), 3: (1, -1)}  # (dv, du)

    padded = np.pad(mag, 1, mode="constant", constant_values=-np.inf)

    def shifted(dv, du):
        return padded[1 + dv : 1 + dv + mag.shape[0], 1 + du : 1 + du + mag.shape[1]]

    keep = np.zeros(mag.shape, dtype=bool)
    for s, (dv, du) in offsets.items():
        fwd = shifted(dv, du)
        bwd = shifted(-dv, -du)
        keep |= (sector == s) & (mag > bwd + tol) & (mag >= fwd - tol)
    return keep & (mag > 0.0)


def extract_depth_boundaries(depth: DepthMap, sky_mask=None,
                             transform=DEFAULT_EDGE_TRANSFORM,
                             sigma=DEFAULT_EDGE_SIGMA) -> EdgeMap:
    """Detect depth boundaries via Canny edges on the transformed depth.

    The transformed grid is Gaussian-smoothed with ``sigma``, Sobel
    gradients are thinned by non-maximum suppression and linked with
    relative hysteresis at (0.1, 0.2) x the maximum gradient magnitude.
    Edges only appear on valid pixels; 8-connected edge components that
    touch invalid non-sky pixels are removed, components touching only sky
    are kept.
    """
    if sigma < 0.0:
        raise ValueError("sigma must be >= 0")
    valid = depth.valid
    if not valid.any():
        raise ValueError("depth map has no valid pixels")
    if sky_mask is None:
        sky_mask = np.zeros(valid.shape, dtype=bool)
    else:
        sky_mask = np.asarray(sky_mask, dtype=bool)
        if sky_mask.shape != valid.shape:
            raise ValueError("sky mask shape mismatch")

    grid = _transform_depth(depth, transform)
    if sigma > 0.0:
        grid = ndimage.gaussian_filter(grid, sigma, mode="nearest")
    gx = ndimage.sobel(grid, axis=1, mode="nearest")
    gy = ndimage.sobel(grid, axis=0, mode="nearest")
    mag = np.hypot(gx, gy)
    mag[~valid] = 0.0

    peak = mag.max()
    if peak <= 0.0:
        return EdgeMap(np.zeros(valid.shape, dtype=bool), transform, float(sigma))
    tol = 1e-9 * peak
    thinned = _nonmax_suppress(mag, gx, gy, tol)
    weak = thinned & (mag >= _CANNY_LOW * peak - tol)
    strong = thinned & (mag >= _CANNY_HIGH * peak - tol)

    labels, _ = ndimage.label(weak, structure=_EIGHT)
    keep_ids = np.unique(labels[strong])
    edges = np.isin(labels, keep_ids[keep_ids > 0])

    bad = ~valid & ~sky_mask
    if bad.any() and edges.any():
        near_bad = ndimage.binary_dilation(bad, structure=_EIGHT)
        labels, _ = ndimage.label(edges, structure=_EIGHT)
        drop = np.unique(labels[edges & near_bad])
        if drop.size:
            edges &= ~np.isin(labels, drop)
    return EdgeMap(edges, transform, float(sigma))


def truncated_edt(edges, tau_edge=DEFAULT_EDGE_TRUNC):
    """Per-pixel Euclidean distance to the nearest edge pixel, clamped at
    ``tau_edge``; an edge-free grid yields the all-tau grid."""
    if tau_edge <= 0.0:
        raise ValueError("tau_edge must be positive")
    grid = edges.edges if isinstance(edges, EdgeMap) else np.asarray(edges, dtype=bool)
    d2 = _kernels.edt_squared(grid)
    return np.minimum(np.sqrt(d2), float(tau_edge))


def edge_accuracy_completeness(pred_edges: EdgeMap, gt_edges: EdgeMap,
                               tau_edge=DEFAULT_EDGE_TRUNC) -> EdgeMetrics:
    """Edge accuracy and completeness in pixels.

    Accuracy: mean truncated distance from each predicted edge pixel to
    the nearest ground-truth edge. Completeness: mean truncated distance
    from each ground-truth edge pixel to the nearest predicted edge. An
    empty pixel set on either side yields the truncation value.
    """
    pe = pred_edges.edges
    ge = gt_edges.edges
    if pe.shape != ge.shape:
        raise ValueError("edge map shapes do not match")
    tau = float(tau_edge)
    acc = float(truncated_edt(ge, tau)[pe].mean()) if pe.any() else tau
    comp = float(truncated_edt(pe, tau)[ge].mean()) if ge.any() else tau
    return EdgeMetrics(edge_acc=acc, edge_comp=comp)


def boundary_masked_metrics(pred: DepthMap, gt: DepthMap, gt_edges: EdgeMap,
                            mask=None, intrinsics: Intrinsics = None,
                            tau=DEFAULT_TAU_3D):
    """Image and pointcloud metrics restricted to ground-truth boundary
    pixels.

    ``mask`` is the regular evaluation mask (defaults to joint validity);
    it is intersected with the edge map. Both pointclouds are restricted
    to the boundary pixels. ``intrinsics`` may be omitted to skip the
    pointcloud suite.

    Returns (ImageMetrics, PointcloudMetrics or None).
    """
    if not gt_edges.edges.any():
        raise ValueError("ground-truth edge map is empty")
    if mask is None:
        mask = pred.valid & gt.valid
    mask = np.asarray(mask, dtype=bool) & gt_edges.edges
    if not mask.any():
        raise ValueError("no evaluation pixels on depth boundaries")
    img: ImageMetrics = image_metrics(pred, gt, mask)
    pcl: PointcloudMetrics = None
    if intrinsics is not None:
        pred_cloud = backproject(DepthMap(pred.values, mask), intrinsics)
        gt_cloud = backproject(DepthMap(gt.values, mask), intrinsics)
        pcl = pointcloud_metrics(pred_cloud, gt_cloud, tau)
    return img, pcl


def save_edge_pgm(path, edge_map: EdgeMap):
    """Write an edge map as binary PGM: 0 = background, 255 = edge."""
    edges = edge_map.edges
    h, w = edges.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write((edges.astype(np.uint8) * 255).tobytes())


def load_edge_pgm(path, transform=DEFAULT_EDGE_TRANSFORM,
                  sigma=DEFAULT_EDGE_SIGMA) -> EdgeMap:
    """Read a PGM edge map written by save_edge_pgm."""
    with open(path, "rb") as fh:
        data = fh.read()
    fieldvals = []
    pos = 0
    while len(fieldvals) < 4:
        nl = data.index(b"\n", pos)
        line = data[pos:nl]
        pos = nl + 1
        if line.startswith(b"#"):
            continue
        fieldvals.extend(line.split())
    magic, w, h, maxval = fieldvals[0], int(fieldvals[1]), int(fieldvals[2]), int(fieldvals[3])
    if magic != b"P5" or maxval != 255:
        raise ValueError("expected a binary 8-bit PGM")
    pixels = np.frombuffer(data[pos : pos + w * h], dtype=np.uint8)
    if pixels.size != w * h:
        raise ValueError("truncated PGM payload")
    return EdgeMap(pixels.reshape(h, w) > 0, transform, sigma)
