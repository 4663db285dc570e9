"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class RiotLabError(Exception):
    """Base class for all toolkit errors."""

    code = "internal"


class ValidationError(RiotLabError):
    """Invalid argument combination or malformed input structure."""

    code = "validation"


class DomainError(RiotLabError):
    """Numeric input outside the validated domain of a model."""

    code = "domain"


class ModelError(RiotLabError):
    """A model produced a physically impossible value (inconsistent constants)."""

    code = "domain"


class CalibrationIncompleteError(RiotLabError):
    """A required node state is missing from the power calibration."""

    code = "validation"

    def __init__(self, missing_states):
        self.missing_states = list(missing_states)
        super().__init__(
            "calibration missing power for state(s): "
            + ", ".join(getattr(s, "value", str(s)) for s in self.missing_states)
        )


class UnitError(RiotLabError):
    """Operation needs a unit conversion parameter that was not supplied."""

    code = "validation"


class DataError(RiotLabError):
    """Non-finite or otherwise unusable data rows."""

    code = "validation"


class InsufficientDataError(DataError):
    """Too few rows for the requested operation."""


class UndefinedMetricError(RiotLabError):
    """R^2 is undefined (zero target variance); MAE/RMSE are still attached."""

    code = "validation"

    def __init__(self, mae: float, rmse: float):
        self.mae = mae
        self.rmse = rmse
        super().__init__("r2 undefined: evaluation targets have zero variance")


class FrameError(RiotLabError):
    """Malformed or oversized wire frame."""

    code = "protocol"


class ProtocolError(RiotLabError):
    """Message sequence or content violates the collection protocol."""

    code = "protocol"


class NotFoundError(RiotLabError):
    """Referenced artifact does not exist in the store."""

    code = "not_found"
