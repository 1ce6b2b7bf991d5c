"""Image-space depth metrics: the legacy suite (including the historical
SqRel variant whose denominator is not squared), the corrected benchmark
suite, alignment protocols and depth capping.
"""

from dataclasses import dataclass, fields

import numpy as np

from ..geometry import DepthMap

# canonical report names, corrected-suite order first
METRIC_ORDER = (
    "MAE",
    "RMSE",
    "InvMAE",
    "InvRMSE",
    "LogMAE",
    "LogRMSE",
    "LogSI",
    "AbsRel",
    "SqRel",
    "SqRel-Legacy",
    "Delta<1.25",
    "Delta<1.25^2",
    "Delta<1.25^3",
)


@dataclass(frozen=True)
class AlignmentMode:
    """Prediction-to-ground-truth alignment: median, fixed or none."""

    mode: str
    scale: float = 1.0

    def __post_init__(self):
        if self.mode not in ("median", "fixed", "none"):
            raise ValueError("mode must be 'median', 'fixed' or 'none'")
        if self.mode == "fixed" and self.scale <= 0.0:
            raise ValueError("fixed scale must be positive")

    @classmethod
    def median(cls):
        return cls("median")

    @classmethod
    def none(cls):
        return cls("none")

    @classmethod
    def fixed(cls, scale):
        return cls("fixed", float(scale))

    @classmethod
    def parse(cls, text):
        """Parse 'median', 'none' or 'fixed:<scale>'."""
        text = text.strip()
        if text in ("median", "none"):
            return cls(text)
        if text.startswith("fixed:"):
            return cls.fixed(float(text.split(":", 1)[1]))
        raise ValueError(f"unknown alignment mode {text!r}")

    def __str__(self):
        return f"fixed:{self.scale:g}" if self.mode == "fixed" else self.mode


@dataclass(frozen=True)
class ImageMetrics:
    mae: float
    rmse: float
    inv_mae: float
    inv_rmse: float
    log_mae: float
    log_rmse: float
    log_si: float
    abs_rel: float
    sq_rel: float
    sq_rel_legacy: float
    delta_1: float
    delta_2: float
    delta_3: float

    _NAMES = dict(
        mae="MAE", rmse="RMSE", inv_mae="InvMAE", inv_rmse="InvRMSE",
        log_mae="LogMAE", log_rmse="LogRMSE", log_si="LogSI",
        abs_rel="AbsRel", sq_rel="SqRel", sq_rel_legacy="SqRel-Legacy",
        delta_1="Delta<1.25", delta_2="Delta<1.25^2", delta_3="Delta<1.25^3",
    )

    def as_dict(self):
        """Metric values keyed by their canonical report names."""
        raw = {self._NAMES[f.name]: getattr(self, f.name) for f in fields(self)}
        return {name: raw[name] for name in METRIC_ORDER}


def align_prediction(pred: DepthMap, gt: DepthMap, mode: AlignmentMode):
    """Scale the prediction onto the ground truth.

    median: multiply by median(gt) / median(pred) over jointly valid
    pixels. fixed: multiply by the configured constant. none: unchanged.
    Returns (aligned prediction, applied scale).
    """
    if mode.mode == "none":
        return pred, 1.0
    if mode.mode == "fixed":
        scale = mode.scale
    else:
        joint = pred.valid & gt.valid
        if not joint.any():
            raise ValueError("median alignment needs jointly valid pixels")
        med_pred = float(np.median(pred.values[joint]))
        if med_pred == 0.0:
            raise ValueError("prediction median is zero")
        scale = float(np.median(gt.values[joint])) / med_pred
    return DepthMap(pred.values * scale, pred.valid), scale


def clamp_and_mask(pred: DepthMap, gt: DepthMap, d_min=1e-3, d_max=100.0):
    """Clamp the prediction into [d_min, d_max] and build the evaluation
    mask: ground truth valid and inside the range (gt is filtered, never
    clamped), intersected with the prediction validity.

    Returns (clamped prediction, gt, mask).
    """
    if not 0.0 < d_min < d_max:
        raise ValueError("need 0 < d_min < d_max")
    if pred.values.shape != gt.values.shape:
        raise ValueError("depth map shapes do not match")
    clamped = DepthMap(np.clip(pred.values, d_min, d_max), pred.valid)
    mask = gt.valid & (gt.values >= d_min) & (gt.values <= d_max) & pred.valid
    return clamped, gt, mask


def image_metrics(pred: DepthMap, gt: DepthMap, mask) -> ImageMetrics:
    """Evaluate the full metric suite over the masked pixels.

    Relative errors are ratios; threshold accuracies are percentages.
    Both SqRel variants are computed: the corrected one divides by y^2,
    the legacy one by plain y.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise ValueError("empty evaluation mask")
    y_hat = pred.values[mask]
    y = gt.values[mask]

    err = y_hat - y
    abs_err = np.abs(err)
    inv_err = np.abs(1.0 / y_hat - 1.0 / y)
    log_err = np.log(y_hat) - np.log(y)
    abs_log = np.abs(log_err)
    # scale-invariant term via the centered form; algebraically identical
    # to sqrt(mean d^2 - (mean d)^2) but exact for constant log error
    si_var = ((log_err - log_err.mean()) ** 2).mean()
    ratio = np.maximum(y_hat / y, y / y_hat)

    return ImageMetrics(
        mae=float(abs_err.mean()),
        rmse=float(np.sqrt((abs_err ** 2).mean())),
        inv_mae=float(inv_err.mean()),
        inv_rmse=float(np.sqrt((inv_err ** 2).mean())),
        log_mae=float(abs_log.mean()),
        log_rmse=float(np.sqrt((abs_log ** 2).mean())),
        log_si=float(np.sqrt(max(si_var, 0.0))),
        abs_rel=float((abs_err / y).mean()),
        sq_rel=float((abs_err ** 2 / y ** 2).mean()),
        sq_rel_legacy=float((abs_err ** 2 / y).mean()),
        delta_1=100.0 * float((ratio < 1.25).mean()),
        delta_2=100.0 * float((ratio < 1.25 ** 2).mean()),
        delta_3=100.0 * float((ratio < 1.25 ** 3).mean()),
    )
