"""Regression models for network current prediction."""

from .io import load_model, model_from_dict, model_to_dict, save_model
from .models import (
    ExtraTrees,
    GradientBoosting,
    Linear,
    Mlp,
    ModelKind,
    RandomForest,
    Ridge,
    TrainedModel,
    evaluate,
    fit,
    kind_from_name,
    predict,
)
from .preprocess import (
    Metrics,
    Standardization,
    compute_metrics,
    standardize_fit,
    standardize_fit_apply,
    train_test_split,
)

__all__ = [
    "ExtraTrees",
    "GradientBoosting",
    "Linear",
    "Metrics",
    "Mlp",
    "ModelKind",
    "RandomForest",
    "Ridge",
    "Standardization",
    "TrainedModel",
    "compute_metrics",
    "evaluate",
    "fit",
    "kind_from_name",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "predict",
    "save_model",
    "standardize_fit",
    "standardize_fit_apply",
    "train_test_split",
]
