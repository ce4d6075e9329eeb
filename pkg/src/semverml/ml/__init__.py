"""Classifiers, resampling, validation protocol, and evaluation statistics.

Everything here is implemented against numpy only, with documented fixed
defaults, so results replay bit-identically from a single master seed.
"""

from .data import BinaryDataset, binarize, project_dimension
from .metrics import (
    cliffs_delta,
    cliffs_magnitude,
    mann_whitney,
    relative_auc,
    roc_auc,
)
from .models import load_model, save_model, train_model
from .resample import smote
from .validation import (
    CrossResult,
    FoldResult,
    evaluate_cross,
    evaluate_dimension,
    evaluate_within,
    ovr_predict,
    stratified_kfold,
)

__all__ = [
    "BinaryDataset", "binarize", "project_dimension",
    "roc_auc", "mann_whitney", "cliffs_delta", "cliffs_magnitude",
    "relative_auc", "smote", "stratified_kfold",
    "train_model", "save_model", "load_model",
    "evaluate_within", "evaluate_dimension", "evaluate_cross",
    "ovr_predict", "FoldResult", "CrossResult",
]
