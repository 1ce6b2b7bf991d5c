from .photometric import (
    LossMap,
    PhotometricConfig,
    PredictiveMask,
    aggregate_reconstruction,
    apply_predictive_mask,
    feature_reconstruction_loss,
    multi_scale_loss,
    photometric_loss,
    ssim,
    static_automask,
)
from .regression import berhu_loss, log_l1_loss, virtual_stereo_loss
from .regularizers import (
    SmoothnessConfig,
    explainability_reg,
    occlusion_loss,
    smoothness_loss,
)

__all__ = [
    "LossMap",
    "PhotometricConfig",
    "PredictiveMask",
    "SmoothnessConfig",
    "aggregate_reconstruction",
    "apply_predictive_mask",
    "berhu_loss",
    "explainability_reg",
    "feature_reconstruction_loss",
    "log_l1_loss",
    "multi_scale_loss",
    "occlusion_loss",
    "photometric_loss",
    "smoothness_loss",
    "ssim",
    "static_automask",
    "virtual_stereo_loss",
]
