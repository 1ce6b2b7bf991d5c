"""Disparity smoothness, occlusion and explainability-mask regularizers.

Smoothness operates on the mean-normalized disparity (d / mean(d)), which
makes every variant invariant to positive rescaling of the disparity map.
Gradients are forward differences with the trailing rows/columns dropped.
"""

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from ..geometry import DisparityMap
from .photometric import PredictiveMask

_EXPLAIN_FLOOR = 1e-7


@dataclass(frozen=True)
class SmoothnessConfig:
    order: int = 1
    edge_aware: bool = True
    gaussian_sigma: float = 0.0
    weight: float = 1.0

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError("order must be 1 or 2")
        if self.gaussian_sigma < 0.0:
            raise ValueError("gaussian_sigma must be >= 0")
        if self.weight < 0.0:
            raise ValueError("weight must be >= 0")


def _image_channels(image):
    img = np.asarray(image, dtype=np.float64)
    return img[:, :, None] if img.ndim == 2 else img


def smoothness_loss(disp: DisparityMap, image=None,
                    config: SmoothnessConfig = SmoothnessConfig()) -> float:
    """Penalty on spatial disparity gradients of the configured order.

    Edge-aware variants damp each gradient by exp(-|dI|), using image
    gradients of the same order averaged over channels. A positive
    gaussian_sigma pre-smooths both grids before differencing. The x and y
    terms are averaged, and the configured weight scales the result.
    """
    d = disp.values
    mean = d.mean()
    if mean <= 0.0:
        raise ValueError("disparity mean must be positive for normalization")
    dn = d / mean

    img = None
    if config.edge_aware:
        if image is None:
            raise ValueError("edge-aware smoothness needs the image")
        img = _image_channels(image)
        if img.shape[:2] != d.shape:
            raise ValueError("image size does not match the disparity map")

    if config.gaussian_sigma > 0.0:
        dn = ndimage.gaussian_filter(dn, config.gaussian_sigma, mode="nearest")
        if img is not None:
            img = np.stack(
                [ndimage.gaussian_filter(img[:, :, c], config.gaussian_sigma,
                                         mode="nearest")
                 for c in range(img.shape[2])],
                axis=-1,
            )

    terms = []
    for axis in (1, 0):
        grad = np.abs(np.diff(dn, n=config.order, axis=axis))
        if img is not None:
            igrad = np.abs(np.diff(img, n=config.order, axis=axis)).mean(axis=2)
            grad = grad * np.exp(-igrad)
        terms.append(grad.mean())
    return config.weight * float((terms[0] + terms[1]) / 2.0)


def occlusion_loss(disp: DisparityMap, variant="background") -> float:
    """Mean disparity (background variant) or mean of 1 - disparity
    (foreground variant): the two sum to 1 on any map."""
    if variant == "background":
        return float(disp.values.mean())
    if variant == "foreground":
        return float((1.0 - disp.values).mean())
    raise ValueError("variant must be 'background' or 'foreground'")


def explainability_reg(mask: PredictiveMask) -> float:
    """Binary cross-entropy against the all-ones target: mean of -log(M).

    Mask values are floored at 1e-7 before the log.
    """
    if mask.kind != "explainability":
        raise ValueError("explainability regularization needs an explainability mask")
    m = np.maximum(mask.values, _EXPLAIN_FLOOR)
    return float(-np.log(m).mean())
