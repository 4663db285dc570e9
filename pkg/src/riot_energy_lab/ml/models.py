"""The six regression model kinds and the fit/predict/evaluate entry points."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..datasets import DatasetRow
from ..errors import ValidationError
from .linear import LinearParams, fit_ols, fit_ridge
from .mlp import MlpParams, fit_mlp
from .preprocess import (
    Metrics,
    Standardization,
    compute_metrics,
    standardize_fit,
    validate_rows,
)
from .trees import (
    SPLIT_BEST,
    SPLIT_RANDOM,
    BoostingParams,
    ForestParams,
    fit_boosting,
    fit_forest,
)

N_FEATURES = 3  # state duration, VLC payload, BLE payload


@dataclass(frozen=True)
class Linear:
    name = "linear"


@dataclass(frozen=True)
class Ridge:
    alpha: float = 1.0
    name = "ridge"


@dataclass(frozen=True)
class RandomForest:
    n_trees: int = 100
    max_depth: int = 5
    bootstrap: bool = True
    name = "rf"


@dataclass(frozen=True)
class ExtraTrees:
    n_trees: int = 100
    max_depth: int = 5
    name = "et"


@dataclass(frozen=True)
class GradientBoosting:
    n_stages: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    name = "gb"


@dataclass(frozen=True)
class Mlp:
    hidden: tuple[int, ...] = (50, 25)
    max_iter: int = 2000
    name = "mlp"


ModelKind = Union[Linear, Ridge, RandomForest, ExtraTrees, GradientBoosting, Mlp]

KIND_NAMES = {"linear": Linear, "ridge": Ridge, "rf": RandomForest, "et": ExtraTrees,
              "gb": GradientBoosting, "mlp": Mlp}


def kind_from_name(name: str) -> ModelKind:
    try:
        return KIND_NAMES[name.lower()]()
    except KeyError:
        raise ValidationError(
            f"unknown model kind {name!r}; choose from {sorted(KIND_NAMES)}"
        ) from None


@dataclass
class TrainedModel:
    kind: ModelKind
    standardization: Standardization
    params: Union[LinearParams, ForestParams, BoostingParams, MlpParams]
    seed: int = 0

    def predict_matrix(self, X: np.ndarray) -> np.ndarray:
        return self.params.predict(self.standardization.apply(X))


def fit(kind: ModelKind, rows: list[DatasetRow], seed: int = 0) -> TrainedModel:
    """Train one model kind on dataset rows (features standardized internally).

    Rows are put in canonical sorted order first, so training is exactly
    invariant to the order of the input (bootstrap draws index into sorted
    row ids).
    """
    X, y = validate_rows(rows)  # reports bad rows by input position
    order = sorted(range(len(rows)), key=lambda i: (rows[i].features(), rows[i].current_ua))
    X, y = X[order], y[order]
    standardization = standardize_fit(X)
    Xs = standardization.apply(X)

    if isinstance(kind, Linear):
        params = fit_ols(Xs, y)
    elif isinstance(kind, Ridge):
        params = fit_ridge(Xs, y, kind.alpha)
    elif isinstance(kind, RandomForest):
        params = fit_forest(
            Xs, y, kind.n_trees, kind.max_depth, kind.bootstrap, seed, SPLIT_BEST
        )
    elif isinstance(kind, ExtraTrees):
        params = fit_forest(
            Xs, y, kind.n_trees, kind.max_depth, bootstrap=False, seed=seed,
            split_strategy=SPLIT_RANDOM,
        )
    elif isinstance(kind, GradientBoosting):
        params = fit_boosting(Xs, y, kind.n_stages, kind.learning_rate, kind.max_depth)
    elif isinstance(kind, Mlp):
        params = fit_mlp(Xs, y, kind.hidden, kind.max_iter, seed)
    else:
        raise ValidationError(f"unknown model kind {kind!r}")
    return TrainedModel(kind, standardization, params, seed)


def predict(model: TrainedModel, features) -> float:
    """Predicted current (uA) for one 3-feature vector."""
    x = np.asarray(features, dtype=float).reshape(-1)
    if x.shape[0] != N_FEATURES:
        raise ValidationError(f"expected {N_FEATURES} features, got {x.shape[0]}")
    return float(model.predict_matrix(x[None, :])[0])


def evaluate(model: TrainedModel, rows: list[DatasetRow]) -> Metrics:
    """Metrics of the model on evaluation rows."""
    if not rows:
        raise ValidationError("need at least one evaluation row")
    X = np.array([r.features() for r in rows], dtype=float)
    y = np.array([r.current_ua for r in rows], dtype=float)
    return compute_metrics(y, model.predict_matrix(X))
