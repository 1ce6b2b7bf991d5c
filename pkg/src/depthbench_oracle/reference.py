"""Naive scalar-loop reference metrics.

Everything here loops over pixels and points one at a time with plain
Python floats and the textbook formulas. No spatial index, no
vectorization, no code shared with the engine. Intended for small
fixtures (up to roughly 64x64).
"""

import math

import numpy as np


def image_metrics_reference(pred_values, gt_values, mask):
    """Full image metric suite via scalar loops, canonical names."""
    pairs = []
    h, w = np.asarray(mask).shape
    for r in range(h):
        for c in range(w):
            if mask[r][c]:
                pairs.append((float(pred_values[r][c]), float(gt_values[r][c])))
    if not pairs:
        raise ValueError("empty mask")
    n = len(pairs)

    def mean(seq):
        return sum(seq) / n

    abs_err = [abs(p - g) for p, g in pairs]
    inv_err = [abs(1.0 / p - 1.0 / g) for p, g in pairs]
    log_err = [math.log(p) - math.log(g) for p, g in pairs]
    ratio = [max(p / g, g / p) for p, g in pairs]

    mean_log = mean(log_err)
    si_sq = mean([d * d for d in log_err]) - mean_log * mean_log

    return {
        "MAE": mean(abs_err),
        "RMSE": math.sqrt(mean([e * e for e in abs_err])),
        "InvMAE": mean(inv_err),
        "InvRMSE": math.sqrt(mean([e * e for e in inv_err])),
        "LogMAE": mean([abs(d) for d in log_err]),
        "LogRMSE": math.sqrt(mean([d * d for d in log_err])),
        "LogSI": math.sqrt(max(si_sq, 0.0)),
        "AbsRel": mean([abs(p - g) / g for p, g in pairs]),
        "SqRel": mean([(p - g) ** 2 / g ** 2 for p, g in pairs]),
        "SqRel-Legacy": mean([(p - g) ** 2 / g for p, g in pairs]),
        "Delta<1.25": 100.0 * mean([1.0 if r < 1.25 else 0.0 for r in ratio]),
        "Delta<1.25^2": 100.0 * mean([1.0 if r < 1.25 ** 2 else 0.0 for r in ratio]),
        "Delta<1.25^3": 100.0 * mean([1.0 if r < 1.25 ** 3 else 0.0 for r in ratio]),
    }


def _nn_distance(point, cloud):
    best = math.inf
    px, py, pz = point
    for qx, qy, qz in cloud:
        dx = qx - px
        d2 = dx * dx
        dy = qy - py
        d2 = d2 + dy * dy
        dz = qz - pz
        d2 = d2 + dz * dz
        if d2 < best:
            best = d2
    return math.sqrt(best)


def pointcloud_metrics_reference(pred_points, gt_points, tau=0.1):
    """Chamfer, precision, recall, F-Score and IoU via O(N^2) loops."""
    pred = [tuple(float(v) for v in p) for p in pred_points]
    gt = [tuple(float(v) for v in p) for p in gt_points]
    if not pred or not gt:
        raise ValueError("need two nonempty clouds")
    d_pred = [_nn_distance(p, gt) for p in pred]
    d_gt = [_nn_distance(g, pred) for g in gt]
    chamfer = sum(d_gt) / len(d_gt) + sum(d_pred) / len(d_pred)
    precision = sum(1.0 for d in d_pred if d < tau) / len(d_pred)
    recall = sum(1.0 for d in d_gt if d < tau) / len(d_gt)
    f_score = 2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
    denom = precision + recall - precision * recall
    iou = precision * recall / denom if denom else 0.0
    return {
        "Chamfer": chamfer,
        "Precision": 100.0 * precision,
        "Recall": 100.0 * recall,
        "F-Score": 100.0 * f_score,
        "IoU": 100.0 * iou,
    }


def edt_reference(edges, tau=10.0):
    """Truncated EDT via per-pixel minimum over every edge pixel."""
    edges = np.asarray(edges, dtype=bool)
    h, w = edges.shape
    pts = [(r, c) for r in range(h) for c in range(w) if edges[r][c]]
    out = np.empty((h, w), dtype=np.float64)
    for r in range(h):
        for c in range(w):
            if not pts:
                out[r][c] = tau
                continue
            best = None
            for er, ec in pts:
                d2 = (er - r) * (er - r) + (ec - c) * (ec - c)
                if best is None or d2 < best:
                    best = d2
            out[r][c] = min(math.sqrt(best), tau)
    return out


def edge_metrics_reference(pred_edges, gt_edges, tau=10.0):
    """Edge accuracy / completeness via the brute-force EDT."""
    pred_edges = np.asarray(pred_edges, dtype=bool)
    gt_edges = np.asarray(gt_edges, dtype=bool)
    dt_gt = edt_reference(gt_edges, tau)
    dt_pred = edt_reference(pred_edges, tau)
    pred_pts = list(zip(*np.nonzero(pred_edges)))
    gt_pts = list(zip(*np.nonzero(gt_edges)))
    acc = sum(dt_gt[r][c] for r, c in pred_pts) / len(pred_pts) if pred_pts else tau
    comp = sum(dt_pred[r][c] for r, c in gt_pts) / len(gt_pts) if gt_pts else tau
    return {"EdgeAcc": float(acc), "EdgeComp": float(comp)}


def _backproject_loop(values, mask, fx, fy, cx, cy):
    pts = []
    h, w = np.asarray(mask).shape
    for r in range(h):
        for c in range(w):
            if mask[r][c]:
                d = float(values[r][c])
                pts.append(((c - cx) / fx * d, (r - cy) / fy * d, d))
    return pts


def oracle_metrics(pred_values, gt_values, mask, intrinsics=None, tau3d=0.1):
    """Image metrics plus, given (fx, fy, cx, cy), pointcloud metrics."""
    out = image_metrics_reference(pred_values, gt_values, mask)
    if intrinsics is not None:
        fx, fy, cx, cy = intrinsics
        pred_pts = _backproject_loop(pred_values, mask, fx, fy, cx, cy)
        gt_pts = _backproject_loop(gt_values, mask, fx, fy, cx, cy)
        out.update(pointcloud_metrics_reference(pred_pts, gt_pts, tau3d))
    return out
