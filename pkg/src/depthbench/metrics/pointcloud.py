"""3D reconstruction metrics over backprojected pointclouds: Chamfer
distance, precision/recall at a distance threshold, F-Score and IoU.

Nearest-neighbour distances come from an exact spatial index (compiled
KD-tree when available, brute force otherwise); both backends return
identical values, so the metrics never depend on the backend.
"""

from dataclasses import dataclass, fields

import numpy as np

from .. import _kernels
from ..geometry import PointCloud

DEFAULT_TAU_3D = 0.1  # meters

POINTCLOUD_METRIC_ORDER = ("Chamfer", "Precision", "Recall", "F-Score", "IoU")


@dataclass(frozen=True)
class PointcloudMetrics:
    chamfer: float  # meters
    precision: float  # percent
    recall: float  # percent
    f_score: float  # percent
    iou: float  # percent

    _NAMES = dict(chamfer="Chamfer", precision="Precision", recall="Recall",
                  f_score="F-Score", iou="IoU")

    def as_dict(self):
        raw = {self._NAMES[f.name]: getattr(self, f.name) for f in fields(self)}
        return {name: raw[name] for name in POINTCLOUD_METRIC_ORDER}


class NNIndex:
    """Exact nearest-neighbour index over a pointcloud.

    Queries return exactly the minimum Euclidean distance over all indexed
    points, identical to brute force.
    """

    def __init__(self, cloud: PointCloud):
        if len(cloud) == 0:
            raise ValueError("cannot index an empty pointcloud")
        self._impl = _kernels.build_nn_index(cloud.points)

    def distances(self, points):
        """NN distance from each (M, 3) query point to the indexed cloud."""
        return self._impl.query(np.asarray(points, dtype=np.float64).reshape(-1, 3))


def build_index(cloud: PointCloud) -> NNIndex:
    return NNIndex(cloud)


def _directed_distances(pred: PointCloud, gt: PointCloud):
    if len(pred) == 0 or len(gt) == 0:
        raise ValueError("pointcloud metrics need two nonempty clouds")
    d_pred = NNIndex(gt).distances(pred.points)  # pred -> gt
    d_gt = NNIndex(pred).distances(gt.points)  # gt -> pred
    return d_pred, d_gt


def chamfer(pred: PointCloud, gt: PointCloud) -> float:
    """Chamfer distance: mean NN distance gt->pred plus mean pred->gt."""
    d_pred, d_gt = _directed_distances(pred, gt)
    return float(d_gt.mean() + d_pred.mean())


def _prf_iou_from_distances(d_pred, d_gt, tau):
    # strict '<': a point exactly at the threshold does not count
    p = float((d_pred < tau).mean())
    r = float((d_gt < tau).mean())
    f = 2.0 * p * r / (p + r) if p + r > 0.0 else 0.0
    denom = p + r - p * r
    iou = p * r / denom if denom > 0.0 else 0.0
    return p, r, f, iou


def prf_iou(pred: PointCloud, gt: PointCloud, tau=DEFAULT_TAU_3D) -> PointcloudMetrics:
    """Precision/recall/F-Score/IoU at the reconstruction threshold ``tau``.

    Precision is the fraction of predicted points strictly within ``tau``
    of the ground truth, recall the converse; F = 2PR/(P+R) and
    IoU = PR/(P+R-PR). The Chamfer field is filled in as well.
    """
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    d_pred, d_gt = _directed_distances(pred, gt)
    p, r, f, iou = _prf_iou_from_distances(d_pred, d_gt, tau)
    return PointcloudMetrics(
        chamfer=float(d_gt.mean() + d_pred.mean()),
        precision=100.0 * p,
        recall=100.0 * r,
        f_score=100.0 * f,
        iou=100.0 * iou,
    )


def pointcloud_metrics(pred: PointCloud, gt: PointCloud,
                       tau=DEFAULT_TAU_3D) -> PointcloudMetrics:
    """Chamfer and threshold metrics from one pair of index builds."""
    return prf_iou(pred, gt, tau)


def export_xyz(path, cloud: PointCloud):
    """Write a cloud as ASCII 'x y z' lines (debugging aid)."""
    with open(path, "w", encoding="ascii") as fh:
        for x, y, z in cloud.points:
            fh.write(f"{float(x)!r} {float(y)!r} {float(z)!r}\n")


def load_xyz(path) -> PointCloud:
    pts = np.loadtxt(path, dtype=np.float64, ndmin=2)
    return PointCloud(pts)
