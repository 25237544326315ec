"""Open-set recognition with fixed simplex class centers.

Class centers sit at the vertices of a regular simplex inscribed in a
hypersphere; training pulls known-class features onto their centers, pushes
auxiliary background samples away, and penalizes features drifting into the
space between centers. Evaluation covers closed-set accuracy, AUROC, and
OSCR.
"""

from ._core import (
    UNKNOWN_LABEL,
    MlpModel,
    SimplexCenters,
    auroc,
    build_simplex,
    closed_set_accuracy,
    forward,
    generate_background,
    generate_blobs,
    init_model,
    intra_loss,
    make_centers,
    make_trials,
    nearest_center,
    oscr,
    outlier_loss,
    roc_points,
    score_samples,
    total_loss,
    train,
    uncertainty_loss,
    uncertainty_ratio,
)

__all__ = [
    "UNKNOWN_LABEL",
    "MlpModel",
    "SimplexCenters",
    "auroc",
    "build_simplex",
    "closed_set_accuracy",
    "forward",
    "generate_background",
    "generate_blobs",
    "init_model",
    "intra_loss",
    "make_centers",
    "make_trials",
    "nearest_center",
    "oscr",
    "outlier_loss",
    "roc_points",
    "score_samples",
    "total_loss",
    "train",
    "uncertainty_loss",
    "uncertainty_ratio",
]

__version__ = "0.1.0"
