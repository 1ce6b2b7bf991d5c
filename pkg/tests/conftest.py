import json

import numpy as np
import pytest

from depthbench.geometry import DepthMap, Intrinsics
from depthbench.io import save_depth_png16
from depthbench_oracle.scenes import (
    ConstantScene,
    RampScene,
    SlantedPlaneScene,
    StepScene,
    render_scene,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_intrinsics(width=16, height=16, fx=20.0, fy=20.0):
    return Intrinsics(fx=fx, fy=fy, cx=(width - 1) / 2.0, cy=(height - 1) / 2.0,
                      width=width, height=height)


def random_depth_pair(rng, width=16, height=16, lo=1.0, hi=60.0, dropout=0.1):
    """Random gt / prediction pair with some invalid gt pixels."""
    gt_vals = rng.uniform(lo, hi, size=(height, width))
    pred_vals = gt_vals * rng.uniform(0.6, 1.5, size=(height, width))
    valid = rng.random((height, width)) >= dropout
    if not valid.any():
        valid[0, 0] = True
    gt = DepthMap(np.where(valid, gt_vals, 0.0), valid)
    pred = DepthMap(pred_vals)
    return pred, gt


SCENE_SET = (
    StepScene(near=1.5, far=12.0, seam=32),
    StepScene(near=2.0, far=9.0, seam=20, axis="horizontal"),
    RampScene(d0=3.0, d1=30.0),
    ConstantScene(depth=6.0),
    SlantedPlaneScene(normal=(0.15, 0.05, 1.0), offset=7.0),
)


def build_synthetic_manifest(root, n_images=5, methods=("exact", "mild", "rough"),
                             width=64, height=48):
    """Write a small synthetic dataset (PNG16 depths) plus its manifest.

    'exact' predicts the ground truth bit for bit, 'mild' and 'rough'
    carry structured multiplicative error of increasing size.
    """
    root.mkdir(parents=True, exist_ok=True)
    k = make_intrinsics(width, height, fx=40.0, fy=40.0)
    noise_rng = np.random.default_rng(7)
    entries = []
    for i in range(n_images):
        depth, _ = render_scene(SCENE_SET[i % len(SCENE_SET)], k)
        gt_path = root / f"gt_{i:02d}.png"
        save_depth_png16(gt_path, depth)
        preds = {}
        for method in methods:
            if method == "exact":
                pred = depth
            else:
                factor = 0.04 if method == "mild" else 0.12
                wobble = 1.0 + factor * np.sin(
                    np.linspace(0, 4 * np.pi, width)[None, :]
                    + noise_rng.uniform(0, np.pi)
                )
                pred = DepthMap(depth.values * wobble, depth.valid)
            pred_path = root / f"pred_{method}_{i:02d}.png"
            save_depth_png16(pred_path, pred)
            preds[method] = pred_path.name
        entries.append({"name": f"scene_{i:02d}", "gt_depth": gt_path.name,
                        "predictions": preds})
    manifest = {
        "intrinsics": {"fx": k.fx, "fy": k.fy, "cx": k.cx, "cy": k.cy},
        "images": entries,
    }
    manifest_path = root / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2), encoding="utf-8")
    return manifest_path
