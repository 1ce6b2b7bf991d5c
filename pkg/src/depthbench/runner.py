"""Evaluation runner: a deterministic parallel map over manifest records
followed by a sequential reduce.

Per image and method: load -> align (median / fixed / none) -> clamp and
mask -> image metrics -> backproject both maps -> pointcloud metrics ->
optional boundary extraction, edge metrics and boundary-restricted
metrics. Aggregates are per-image means in manifest order, so the output
is identical across worker counts and repeated runs.
"""

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import io
from .geometry import DepthMap, Intrinsics, backproject
from .manifest import ImageRecord, Manifest
from .metrics.edge import (
    DEFAULT_EDGE_SIGMA,
    DEFAULT_EDGE_TRANSFORM,
    DEFAULT_EDGE_TRUNC,
    boundary_masked_metrics,
    edge_accuracy_completeness,
    extract_depth_boundaries,
)
from .metrics.image import AlignmentMode, align_prediction, clamp_and_mask, image_metrics
from .metrics.pointcloud import DEFAULT_TAU_3D, pointcloud_metrics
from .report import BOUNDARY_SUFFIX, HEADLINE_KEYS, MetricReport, rank_methods

SUITES = ("image", "pointcloud", "edge")


def default_jobs():
    env = os.environ.get("DEPTHBENCH_JOBS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 1


@dataclass(frozen=True)
class Protocol:
    """Evaluation protocol; the defaults encode the corrected procedure:
    100 m cap, median scaling, no cropping, no post-processing."""

    align: AlignmentMode = field(default_factory=AlignmentMode.median)
    min_depth: float = 1e-3
    max_depth: float = 100.0
    suites: tuple = SUITES
    edge_transform: str = DEFAULT_EDGE_TRANSFORM
    edge_sigma: float = DEFAULT_EDGE_SIGMA
    edge_trunc: float = DEFAULT_EDGE_TRUNC
    tau3d: float = DEFAULT_TAU_3D
    legacy_sqrel: bool = False
    allow_partial: bool = False
    jobs: int = 0  # 0 = DEPTHBENCH_JOBS or 1

    def __post_init__(self):
        for suite in self.suites:
            if suite not in SUITES:
                raise ValueError(f"unknown suite {suite!r}")
        if not 0.0 < self.min_depth < self.max_depth:
            raise ValueError("need 0 < min_depth < max_depth")

    def snapshot(self):
        """Configuration snapshot embedded in every report."""
        return {
            "align": str(self.align),
            "min_depth": self.min_depth,
            "max_depth": self.max_depth,
            "suites": list(self.suites),
            "edge_transform": self.edge_transform,
            "edge_sigma": self.edge_sigma,
            "edge_trunc": self.edge_trunc,
            "tau3d": self.tau3d,
            "legacy_sqrel": self.legacy_sqrel,
            "aggregation": "mean of per-image metrics in manifest order",
            "pointcloud_pixels": "jointly valid pixels after alignment and clamping",
            "boundary_restriction": "both pointclouds restricted to gt boundary pixels",
            "border_crop": "none",
            "post_processing": "none",
        }


def _intrinsics_for(record: ImageRecord, manifest_default, shape) -> Intrinsics:
    params = record.intrinsics or manifest_default
    if params is None:
        return None
    return Intrinsics(
        fx=float(params["fx"]), fy=float(params["fy"]),
        cx=float(params["cx"]), cy=float(params["cy"]),
        width=shape[1], height=shape[0],
    )


def evaluate_pair(pred: DepthMap, gt: DepthMap, protocol: Protocol,
                  intrinsics: Intrinsics = None, sky_mask=None, gt_edges=None):
    """Evaluate one prediction against one ground truth.

    Returns a flat {metric name: value} dict covering the enabled suites.
    """
    aligned, scale = align_prediction(pred, gt, protocol.align)
    clamped, gt, mask = clamp_and_mask(aligned, gt, protocol.min_depth, protocol.max_depth)
    if not mask.any():
        raise ValueError("no evaluable pixels after masking")
    out = {"applied_scale": float(scale)}

    if "image" in protocol.suites:
        img = image_metrics(clamped, gt, mask).as_dict()
        if not protocol.legacy_sqrel:
            img.pop("SqRel-Legacy")
        out.update(img)

    if "pointcloud" in protocol.suites:
        if intrinsics is None:
            raise ValueError("pointcloud suite needs camera intrinsics")
        pred_cloud = backproject(DepthMap(clamped.values, mask), intrinsics)
        gt_cloud = backproject(DepthMap(gt.values, mask), intrinsics)
        out.update(pointcloud_metrics(pred_cloud, gt_cloud, protocol.tau3d).as_dict())

    if "edge" in protocol.suites:
        if gt_edges is None:
            gt_edges = extract_depth_boundaries(
                gt, sky_mask, protocol.edge_transform, protocol.edge_sigma
            )
        pred_edges = extract_depth_boundaries(
            clamped, None, protocol.edge_transform, protocol.edge_sigma
        )
        out.update(
            edge_accuracy_completeness(pred_edges, gt_edges, protocol.edge_trunc).as_dict()
        )
        boundary_mask = mask & gt_edges.edges
        if boundary_mask.any():
            img_b, pcl_b = boundary_masked_metrics(
                clamped, gt, gt_edges, mask,
                intrinsics if "pointcloud" in protocol.suites else None,
                protocol.tau3d,
            )
            bdict = img_b.as_dict()
            if not protocol.legacy_sqrel:
                bdict.pop("SqRel-Legacy")
            if pcl_b is not None:
                bdict.update(pcl_b.as_dict())
            out.update({k + BOUNDARY_SUFFIX: v for k, v in bdict.items()})
    return out


def _evaluate_record(payload):
    record, default_intrinsics, protocol = payload
    results = {}
    try:
        gt = io.load_depth_any(record.gt_depth)
        sky = io.load_sky_mask(record.sky_mask) if record.sky_mask else None
        intrinsics = _intrinsics_for(record, default_intrinsics, gt.values.shape)
        gt_edges = None
        if "edge" in protocol.suites:
            gt_edges = extract_depth_boundaries(
                gt, sky, protocol.edge_transform, protocol.edge_sigma
            )
    except Exception as exc:
        return record.name, {m: {"error": f"{exc}"} for m in record.predictions}

    for method, pred_path in record.predictions.items():
        try:
            pred = io.load_depth_any(pred_path)
            if pred.values.shape != gt.values.shape:
                raise ValueError(
                    f"prediction shape {pred.values.shape} does not match "
                    f"ground truth {gt.values.shape}"
                )
            results[method] = evaluate_pair(pred, gt, protocol, intrinsics, sky, gt_edges)
        except Exception as exc:
            results[method] = {"error": f"{exc}"}
    return record.name, results


def run_evaluation(manifest: Manifest, protocol: Protocol = Protocol()) -> MetricReport:
    """Evaluate every method in the manifest and build the metric report.

    Per-image failures are recorded and the run aborts unless the protocol
    allows partial results; failed images are excluded from every method's
    aggregates to keep the comparison like-for-like.
    """
    jobs = protocol.jobs if protocol.jobs > 0 else default_jobs()
    payloads = [(rec, manifest.default_intrinsics, protocol) for rec in manifest.records]
    if jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            raw = list(pool.map(_evaluate_record, payloads))
    else:
        raw = [_evaluate_record(p) for p in payloads]

    failures = []
    failed_images = set()
    for name, results in raw:
        for method, res in results.items():
            if "error" in res:
                failures.append({"image": name, "method": method, "error": res["error"]})
                failed_images.add(name)
    if failures and not protocol.allow_partial:
        detail = "; ".join(f"{f['image']}/{f['method']}: {f['error']}" for f in failures[:5])
        raise RuntimeError(f"{len(failures)} evaluation failure(s): {detail}")

    kept = [(name, results) for name, results in raw if name not in failed_images]
    if not kept:
        raise RuntimeError("no images left to aggregate")
    image_names = [name for name, _ in kept]

    per_image = {m: [] for m in manifest.methods}
    for name, results in kept:
        for method in manifest.methods:
            per_image[method].append({"name": name, **results[method]})

    aggregates = {}
    for method in manifest.methods:
        keys = []
        for entry in per_image[method]:
            for key in entry:
                if key not in ("name",) and key not in keys:
                    keys.append(key)
        aggs = {}
        for key in keys:
            values = [e[key] for e in per_image[method] if key in e]
            aggs[key] = float(np.mean(values))
        aggregates[method] = aggs

    ranks = {}
    shared = set.intersection(*(set(a) for a in aggregates.values())) if aggregates else set()
    for key in sorted(shared):
        if key == "applied_scale":
            continue
        ranks[key] = rank_methods(aggregates, key)
    for suite, (key, direction) in HEADLINE_KEYS.items():
        if suite in protocol.suites and key in shared:
            ranks[f"rank:{suite}"] = rank_methods(aggregates, key, direction)

    n_edge = 0
    if manifest.methods:
        first = manifest.methods[0]
        n_edge = sum(
            1 for e in per_image[first] if any(k.endswith(BOUNDARY_SUFFIX) for k in e)
        )
    return MetricReport(
        protocol=protocol.snapshot(),
        methods=list(manifest.methods),
        image_names=image_names,
        per_image=per_image,
        aggregates=aggregates,
        ranks=ranks,
        failures=failures,
        counts={"images": len(image_names), "images_with_boundaries": n_edge},
    )
