"""Proxy-depth regression losses and virtual stereo consistency."""

import numpy as np

from ..geometry import DepthMap, DisparityMap


def _joint_errors(pred: DepthMap, proxy: DepthMap):
    if pred.values.shape != proxy.values.shape:
        raise ValueError("depth map shapes do not match")
    joint = pred.valid & proxy.valid
    if not joint.any():
        raise ValueError("no jointly valid pixels")
    return np.abs(pred.values[joint] - proxy.values[joint])


def berhu_loss(pred: DepthMap, proxy: DepthMap, tau=None):
    """Reverse Huber loss: |e| up to tau, (e^2 + tau^2) / (2*tau) above.

    When ``tau`` is not given it is set adaptively to 0.2 * max|e| over the
    jointly valid pixels. Returns (mean loss, tau used); both are 0 for a
    perfect prediction.
    """
    err = _joint_errors(pred, proxy)
    if tau is None:
        tau = 0.2 * float(err.max())
    elif tau <= 0.0:
        raise ValueError("tau must be positive")
    if tau == 0.0:
        return 0.0, 0.0
    per_pixel = np.where(err <= tau, err, (err * err + tau * tau) / (2.0 * tau))
    return float(per_pixel.mean()), float(tau)


def log_l1_loss(pred: DepthMap, proxy: DepthMap):
    """Mean log(1 + |e|) over jointly valid pixels."""
    err = _joint_errors(pred, proxy)
    return float(np.log1p(err).mean())


def virtual_stereo_loss(disp_target: DisparityMap, disp_virtual_warped: DisparityMap,
                        warp_valid=None):
    """Mean absolute difference between the target disparity and the
    virtual-view disparity warped into the target frame.

    ``warp_valid`` carries the synthesis validity mask of the warped grid;
    without it every pixel counts.
    """
    a = disp_target.values
    b = disp_virtual_warped.values
    if a.shape != b.shape:
        raise ValueError("disparity shapes do not match")
    if warp_valid is None:
        warp_valid = np.ones(a.shape, dtype=bool)
    else:
        warp_valid = np.asarray(warp_valid, dtype=bool)
    if not warp_valid.any():
        raise ValueError("no valid warped pixels")
    return float(np.abs(a - b)[warp_valid].mean())
