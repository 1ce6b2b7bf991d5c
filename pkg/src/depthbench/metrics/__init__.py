from .image import (
    AlignmentMode,
    ImageMetrics,
    align_prediction,
    clamp_and_mask,
    image_metrics,
)
from .pointcloud import (
    NNIndex,
    PointcloudMetrics,
    build_index,
    chamfer,
    pointcloud_metrics,
    prf_iou,
)
from .edge import (
    EdgeMap,
    EdgeMetrics,
    boundary_masked_metrics,
    edge_accuracy_completeness,
    extract_depth_boundaries,
    truncated_edt,
)

__all__ = [
    "AlignmentMode",
    "EdgeMap",
    "EdgeMetrics",
    "ImageMetrics",
    "NNIndex",
    "PointcloudMetrics",
    "align_prediction",
    "boundary_masked_metrics",
    "build_index",
    "chamfer",
    "clamp_and_mask",
    "edge_accuracy_completeness",
    "extract_depth_boundaries",
    "image_metrics",
    "pointcloud_metrics",
    "prf_iou",
    "truncated_edt",
]
