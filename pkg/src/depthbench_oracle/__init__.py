"""Test substrate for the depth benchmarking engine.

Synthetic scenes with closed-form depth plus naive scalar-loop reference
implementations of every metric. The reference code deliberately avoids
the engine's vectorized paths and spatial index so a shared bug cannot
hide; keep it slow and obvious.
"""

from .scenes import (
    ConstantScene,
    RampScene,
    SlantedPlaneScene,
    StepScene,
    render_scene,
)
from .reference import (
    edge_metrics_reference,
    edt_reference,
    image_metrics_reference,
    oracle_metrics,
    pointcloud_metrics_reference,
)

__all__ = [
    "ConstantScene",
    "RampScene",
    "SlantedPlaneScene",
    "StepScene",
    "edge_metrics_reference",
    "edt_reference",
    "image_metrics_reference",
    "oracle_metrics",
    "pointcloud_metrics_reference",
    "render_scene",
]
