"""depthbench: benchmarking engine for monocular depth estimation.

Corrected image-, pointcloud- and edge-based evaluation metrics, the
self-supervised view-synthesis loss family as pure forward computations,
and equirectangular panorama patch extraction.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .geometry import (
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
    reproject,
    synthesize_view,
)
from .manifest import Manifest, load_manifest
from .metrics import (
    AlignmentMode,
    EdgeMap,
    EdgeMetrics,
    ImageMetrics,
    NNIndex,
    PointcloudMetrics,
    align_prediction,
    boundary_masked_metrics,
    build_index,
    chamfer,
    clamp_and_mask,
    edge_accuracy_completeness,
    extract_depth_boundaries,
    image_metrics,
    pointcloud_metrics,
    prf_iou,
    truncated_edt,
)
from .report import MetricReport, emit_report, load_report, rank_methods
from .runner import Protocol, evaluate_pair, run_evaluation

__version__ = "0.1.0"

__all__ = [
    "AlignmentMode",
    "DepthMap",
    "DepthRange",
    "DisparityMap",
    "EdgeMap",
    "EdgeMetrics",
    "ImageMetrics",
    "Intrinsics",
    "KERNEL_BACKEND",
    "Manifest",
    "MetricReport",
    "NNIndex",
    "PointCloud",
    "PointcloudMetrics",
    "Protocol",
    "RigidTransform",
    "align_prediction",
    "axis_angle_to_transform",
    "backproject",
    "bilinear_sample",
    "boundary_masked_metrics",
    "build_index",
    "chamfer",
    "clamp_and_mask",
    "disp_to_depth",
    "edge_accuracy_completeness",
    "emit_report",
    "evaluate_pair",
    "extract_depth_boundaries",
    "image_metrics",
    "load_manifest",
    "load_report",
    "pointcloud_metrics",
    "prf_iou",
    "rank_methods",
    "reproject",
    "run_evaluation",
    "synthesize_view",
    "truncated_edt",
    "__version__",
]
