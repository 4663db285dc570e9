"""Feature standardization, dataset splitting, and evaluation metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..datasets import DatasetRow, rows_to_arrays
from ..errors import DataError, InsufficientDataError, UndefinedMetricError


@dataclass(frozen=True)
class Standardization:
    """Per-feature (x - mean) / std parameters.

    Uses the population convention (divide by n).  Constant features get a
    std of 1 so the transform stays defined; ``constant_features`` records
    which ones were degenerate.
    """

    mean: np.ndarray
    std: np.ndarray
    constant_features: tuple[int, ...] = ()

    def apply(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.std

    @property
    def has_warning(self) -> bool:
        return bool(self.constant_features)


def standardize_fit(X: np.ndarray) -> Standardization:
    if X.shape[0] < 2:
        raise InsufficientDataError("standardization needs at least 2 rows")
    mean = X.mean(axis=0)
    std = X.std(axis=0)  # population (ddof=0)
    constant = tuple(int(i) for i in np.flatnonzero(std == 0.0))
    if constant:
        std = std.copy()
        std[list(constant)] = 1.0
    return Standardization(mean, std, constant)


def standardize_fit_apply(rows: list[DatasetRow]) -> tuple[Standardization, np.ndarray]:
    """Fit standardization on dataset rows and return the transformed features."""
    X, _ = rows_to_arrays(rows)
    params = standardize_fit(X)
    return params, params.apply(X)


def validate_rows(rows: list[DatasetRow]) -> tuple[np.ndarray, np.ndarray]:
    """(X, y) with a :class:`DataError` naming the first non-finite row."""
    if len(rows) < 2:
        raise InsufficientDataError(f"need at least 2 rows, got {len(rows)}")
    X, y = rows_to_arrays(rows)
    bad = ~(np.all(np.isfinite(X), axis=1) & np.isfinite(y))
    if np.any(bad):
        raise DataError(f"non-finite value in dataset row {int(np.flatnonzero(bad)[0])}")
    return X, y


@dataclass(frozen=True)
class Metrics:
    r2: float
    mae_ua: float
    rmse_ua: float

    def __post_init__(self):
        if self.mae_ua < 0 or self.rmse_ua < self.mae_ua - 1e-9:
            raise DataError("metrics must satisfy rmse >= mae >= 0")
        if self.r2 > 1 + 1e-12:
            raise DataError("r2 cannot exceed 1")


def compute_metrics(y_true: np.ndarray, y_pred: np.ndarray) -> Metrics:
    """R^2, MAE, RMSE of predictions against targets.

    Raises :class:`UndefinedMetricError` (carrying MAE/RMSE) when the targets
    have zero variance, since R^2 is undefined there.
    """
    if y_true.shape[0] < 1:
        raise InsufficientDataError("need at least one evaluation row")
    err = y_pred - y_true
    mae = float(np.mean(np.abs(err)))
    rmse = float(np.sqrt(np.mean(err**2)))
    sst = float(np.sum((y_true - y_true.mean()) ** 2))
    if sst == 0.0:
        raise UndefinedMetricError(mae, rmse)
    sse = float(np.sum(err**2))
    return Metrics(1.0 - sse / sst, mae, rmse)


def train_test_split(
    rows: list[DatasetRow], test_fraction: float, seed: int
) -> tuple[list[DatasetRow], list[DatasetRow]]:
    """Seeded disjoint split, invariant to the order of the input rows.

    Rows are put in canonical (sorted) order before the seeded shuffle, so
    permuting the input yields the same partition.
    """
    if not 0.0 < test_fraction < 1.0:
        raise DataError("test_fraction must be in (0, 1)")
    ordered = sorted(rows, key=lambda r: (r.features(), r.current_ua))
    perm = np.random.default_rng(seed).permutation(len(ordered))
    n_test = max(1, int(round(len(ordered) * test_fraction)))
    test_idx = set(int(i) for i in perm[:n_test])
    train = [ordered[i] for i in range(len(ordered)) if i not in test_idx]
    test = [ordered[i] for i in range(len(ordered)) if i in test_idx]
    return train, test
