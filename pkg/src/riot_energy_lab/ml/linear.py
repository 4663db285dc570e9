"""Closed-form linear and ridge regression on standardized features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LinearParams:
    weights: np.ndarray
    intercept: float

    def predict(self, Xs: np.ndarray) -> np.ndarray:
        return Xs @ self.weights + self.intercept


def fit_ols(Xs: np.ndarray, y: np.ndarray) -> LinearParams:
    """Ordinary least squares via the pseudo-inverse (handles rank deficiency)."""
    A = np.column_stack([np.ones(Xs.shape[0]), Xs])
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    return LinearParams(coef[1:], float(coef[0]))


def fit_ridge(Xs: np.ndarray, y: np.ndarray, alpha: float) -> LinearParams:
    """L2-penalized least squares; the intercept is not penalized.

    With population-standardized features the columns are exactly centered,
    so the intercept separates out as mean(y) and the weights solve
    (Xs'Xs + alpha I) w = Xs' (y - mean(y)).
    """
    y_mean = float(np.mean(y))
    yc = y - y_mean
    n_feat = Xs.shape[1]
    w = np.linalg.solve(Xs.T @ Xs + alpha * np.eye(n_feat), Xs.T @ yc)
    return LinearParams(w, y_mean)
