"""NumPy implementations of the hot kernels.

Arithmetic mirrors the compiled module operation for operation (same
accumulation order, no fused multiply-add), so results are bit-identical
between backends.
"""

import numpy as np
from scipy import ndimage


class BruteForceIndex:
    """Exact nearest-neighbour distances via chunked brute force."""

    def __init__(self, points):
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError("points must have shape (N, 3)")
        if pts.shape[0] == 0:
            raise ValueError("cannot index an empty pointcloud")
        self._points = pts

    def query(self, queries):
        qs = np.ascontiguousarray(queries, dtype=np.float64)
        if qs.ndim != 2 or qs.shape[1] != 3:
            raise ValueError("queries must have shape (M, 3)")
        pts = self._points
        out = np.empty(qs.shape[0], dtype=np.float64)
        # keep the pairwise block below ~4M doubles
        chunk = max(1, int(4_000_000 // max(pts.shape[0], 1)))
        for start in range(0, qs.shape[0], chunk):
            block = qs[start : start + chunk]
            d2 = ((block[:, None, :] - pts[None, :, :]) ** 2).sum(axis=2)
            out[start : start + chunk] = np.sqrt(d2.min(axis=1))
        return out


def edt_squared(edges):
    """Exact squared Euclidean distance to the nearest edge pixel.

    Returned values are integers stored as float64; pixels of an edge-free
    grid get +inf.
    """
    edges = np.asarray(edges, dtype=bool)
    if not edges.any():
        return np.full(edges.shape, np.inf, dtype=np.float64)
    ind = ndimage.distance_transform_edt(
        ~edges, return_distances=False, return_indices=True
    )
    rr, cc = np.indices(edges.shape)
    d2 = (ind[0] - rr) ** 2 + (ind[1] - cc) ** 2
    return d2.astype(np.float64)


def bilinear_gather(image, u, v):
    """Bilinear samples of ``image`` (H, W, C) at continuous pixel coords.

    Returns (values (P, C), in_bounds (P,)); out-of-bounds samples are 0.
    """
    img = np.ascontiguousarray(image, dtype=np.float64)
    h, w = img.shape[:2]
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    inb = (u >= 0.0) & (u <= w - 1.0) & (v >= 0.0) & (v <= h - 1.0)

    x0 = np.floor(u)
    y0 = np.floor(v)
    tx = u - x0
    ty = v - y0
    ix0 = np.clip(x0.astype(np.int64), 0, w - 1)
    iy0 = np.clip(y0.astype(np.int64), 0, h - 1)
    ix1 = np.minimum(ix0 + 1, w - 1)
    iy1 = np.minimum(iy0 + 1, h - 1)

    v00 = img[iy0, ix0]
    v01 = img[iy0, ix1]
    v10 = img[iy1, ix0]
    v11 = img[iy1, ix1]
    tx = tx[:, None]
    ty = ty[:, None]
    row0 = v00 * (1.0 - tx) + v01 * tx
    row1 = v10 * (1.0 - tx) + v11 * tx
    out = row0 * (1.0 - ty) + row1 * ty
    out[~inb] = 0.0
    return out, inb
