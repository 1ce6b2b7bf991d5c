"""View-synthesis loss family: SSIM + L1 photometric error, per-pixel
reconstruction aggregation, static-pixel automasking, predictive-mask
weighting, feature reconstruction and multi-scale aggregation.

All functions are forward computations over NumPy grids; images are float
grids in [0, 1], (H, W) or (H, W, C).
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .. import geometry


@dataclass(frozen=True)
class PhotometricConfig:
    """SSIM weighting and window settings.

    The defaults (alpha = 0.85, 3x3 mean windows, c1 = 0.01^2,
    c2 = 0.03^2) follow the common monocular-depth convention.
    """

    ssim_weight: float = 0.85
    ssim_window: int = 3
    ssim_c1: float = 0.01 ** 2
    ssim_c2: float = 0.03 ** 2

    def __post_init__(self):
        if not 0.0 <= self.ssim_weight <= 1.0:
            raise ValueError("ssim_weight must lie in [0, 1]")
        if self.ssim_window < 1 or self.ssim_window % 2 == 0:
            raise ValueError("ssim_window must be odd and >= 1")


class LossMap:
    """Per-pixel loss grid with a validity mask."""

    __slots__ = ("values", "valid")

    def __init__(self, values, valid=None):
        vals = np.asarray(values, dtype=np.float64)
        if vals.ndim != 2:
            raise ValueError("loss grid must be 2D")
        if valid is None:
            valid = np.ones(vals.shape, dtype=bool)
        else:
            valid = np.asarray(valid, dtype=bool)
            if valid.shape != vals.shape:
                raise ValueError("validity mask shape mismatch")
        self.values = vals
        self.valid = valid


@dataclass(frozen=True)
class PredictiveMask:
    """Per-pixel loss weighting mask.

    ``explainability`` masks hold weights in [0, 1]; ``uncertainty`` masks
    hold unbounded log-variances.
    """

    kind: str
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in ("explainability", "uncertainty"):
            raise ValueError("kind must be 'explainability' or 'uncertainty'")
        vals = np.asarray(self.values, dtype=np.float64)
        if self.kind == "explainability" and (vals.min() < 0.0 or vals.max() > 1.0):
            raise ValueError("explainability values must lie in [0, 1]")
        object.__setattr__(self, "values", vals)


def _mean_filter(grid, window):
    if window == 1:
        return grid
    return ndimage.uniform_filter(grid, size=window, mode="nearest")


def _as_channels(image):
    img = np.asarray(image, dtype=np.float64)
    if img.ndim == 2:
        return img[:, :, None]
    if img.ndim == 3:
        return img
    raise ValueError("images must be (H, W) or (H, W, C)")


def ssim(a, b, config: PhotometricConfig = PhotometricConfig()):
    """Per-pixel local-window SSIM, averaged over channels.

    Windows are box means with replicate padding so the output keeps the
    full image resolution. Values lie in [-1, 1].
    """
    ia = _as_channels(a)
    ib = _as_channels(b)
    if ia.shape != ib.shape:
        raise ValueError("image shapes do not match")
    c1, c2, win = config.ssim_c1, config.ssim_c2, config.ssim_window
    out = np.zeros(ia.shape[:2], dtype=np.float64)
    for ch in range(ia.shape[2]):
        x, y = ia[:, :, ch], ib[:, :, ch]
        mu_x = _mean_filter(x, win)
        mu_y = _mean_filter(y, win)
        var_x = _mean_filter(x * x, win) - mu_x * mu_x
        var_y = _mean_filter(y * y, win) - mu_y * mu_y
        cov = _mean_filter(x * y, win) - mu_x * mu_y
        num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
        den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
        out += num / den
    return out / ia.shape[2]


def photometric_loss(target, synth, config: PhotometricConfig = PhotometricConfig(),
                     synth_valid=None) -> LossMap:
    """Weighted SSIM + L1 error: alpha*(1 - SSIM)/2 + (1 - alpha)*|t - s|."""
    it = _as_channels(target)
    isyn = _as_channels(synth)
    if it.shape != isyn.shape:
        raise ValueError("image shapes do not match")
    alpha = config.ssim_weight
    l1 = np.abs(it - isyn).mean(axis=2)
    if alpha > 0.0:
        dssim = np.clip((1.0 - ssim(it, isyn, config)) * 0.5, 0.0, None)
        values = alpha * dssim + (1.0 - alpha) * l1
    else:
        values = l1
    return LossMap(values, synth_valid)


def aggregate_reconstruction(losses, mode="minimum"):
    """Combine per-source loss maps into one reconstruction loss map.

    ``average`` takes the per-pixel mean over the sources valid at that
    pixel; ``minimum`` takes the per-pixel minimum over valid sources and
    records the winning source index (-1 where no source is valid). Pixels
    valid in no source come out invalid.

    Returns (LossMap, source_index or None).
    """
    if not losses:
        raise ValueError("need at least one loss map")
    if mode not in ("average", "minimum"):
        raise ValueError("mode must be 'average' or 'minimum'")
    shape = losses[0].values.shape
    for lm in losses:
        if lm.values.shape != shape:
            raise ValueError("loss map shapes do not match")
    vals = np.stack([lm.values for lm in losses])
    valid = np.stack([lm.valid for lm in losses])
    any_valid = valid.any(axis=0)

    if mode == "average":
        count = valid.sum(axis=0)
        total = np.where(valid, vals, 0.0).sum(axis=0)
        out = np.where(any_valid, total / np.maximum(count, 1), 0.0)
        return LossMap(out, any_valid), None

    masked = np.where(valid, vals, np.inf)
    src = masked.argmin(axis=0)
    out = np.where(any_valid, masked.min(axis=0), 0.0)
    return LossMap(out, any_valid), np.where(any_valid, src, -1)


def static_automask(synth_losses, identity_losses):
    """Keep pixels where warped reconstruction beats the unwarped frames.

    Per pixel: [min over synthesized losses < min over identity losses];
    ties are removed (strict inequality). True = keep.
    """
    if not synth_losses or not identity_losses:
        raise ValueError("need at least one synthesized and one identity loss map")
    min_synth, _ = aggregate_reconstruction(synth_losses, mode="minimum")
    min_ident, _ = aggregate_reconstruction(identity_losses, mode="minimum")
    synth = np.where(min_synth.valid, min_synth.values, np.inf)
    ident = np.where(min_ident.valid, min_ident.values, np.inf)
    return synth < ident


def apply_predictive_mask(loss: LossMap, mask: PredictiveMask) -> LossMap:
    """Weight a loss map by a predictive mask.

    explainability: M * L. uncertainty: exp(-M) * L + M (the additive term
    is the usual log-variance penalty, so values may go negative for
    strongly down-weighted pixels).
    """
    m = mask.values
    if m.shape != loss.values.shape:
        raise ValueError("mask shape does not match the loss map")
    if mask.kind == "explainability":
        values = m * loss.values
    else:
        values = np.exp(-m) * loss.values + m
    return LossMap(values, loss.valid)


def feature_reconstruction_loss(target_feats, support_feats, warps,
                                distance="photometric",
                                config: PhotometricConfig = PhotometricConfig()):
    """Feature-space reconstruction loss over one or more support frames.

    ``support_feats`` is a list of (H, W, C) grids and ``warps`` the
    matching list of (coords, valid) correspondence fields from
    geometry.warp_field. Support features are warped with the same
    correspondences as image synthesis, per-pixel distances are
    min-aggregated over sources and averaged over valid pixels.

    ``distance`` selects the per-pixel measure: the photometric SSIM + L1
    error or the plain L2 norm over channels.
    """
    if distance not in ("photometric", "l2"):
        raise ValueError("distance must be 'photometric' or 'l2'")
    ft = _as_channels(target_feats)
    if len(support_feats) != len(warps):
        raise ValueError("need one warp field per support feature grid")
    maps = []
    for feats, (coords, warp_valid) in zip(support_feats, warps):
        fs = _as_channels(feats)
        if fs.shape[2] != ft.shape[2]:
            raise ValueError("feature channel counts do not match")
        warped, in_bounds = geometry.bilinear_sample(fs, coords)
        valid = warp_valid & in_bounds
        if distance == "photometric":
            maps.append(photometric_loss(ft, warped, config, valid))
        else:
            diff = ft - warped
            maps.append(LossMap(np.sqrt((diff * diff).sum(axis=2)), valid))
    agg, _ = aggregate_reconstruction(maps, mode="minimum")
    if not agg.valid.any():
        raise ValueError("no valid pixels in any support frame")
    return float(agg.values[agg.valid].mean())


def _upsample_bilinear(grid, out_shape):
    h, w = grid.shape
    oh, ow = out_shape
    us = np.linspace(0.0, w - 1.0, ow) if ow > 1 else np.zeros(1)
    vs = np.linspace(0.0, h - 1.0, oh) if oh > 1 else np.zeros(1)
    uu, vv = np.meshgrid(us, vs)
    values, _ = geometry.bilinear_sample(grid, np.stack([uu, vv], axis=-1))
    return values


def multi_scale_loss(per_scale_disparities, evaluator, full_shape):
    """Evaluate a loss at full resolution for every prediction scale.

    Each disparity map must be a power-of-two downsampling of
    ``full_shape``; it is bilinearly upsampled, passed to ``evaluator``
    (DisparityMap -> scalar) and the per-scale scalars are averaged.

    Returns (mean loss, per-scale losses).
    """
    if not per_scale_disparities:
        raise ValueError("need at least one scale")
    oh, ow = full_shape
    per_scale = []
    for disp in per_scale_disparities:
        h, w = disp.values.shape
        if oh % h or ow % w:
            raise ValueError(f"scale {w}x{h} does not divide {ow}x{oh}")
        factor = oh // h
        if ow // w != factor or factor & (factor - 1):
            raise ValueError(f"scale {w}x{h} is not a power-of-two downsampling")
        up = geometry.DisparityMap(_upsample_bilinear(disp.values, full_shape))
        per_scale.append(float(evaluator(up)))
    return float(np.mean(per_scale)), per_scale
