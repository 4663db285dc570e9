"""ML-ready datasets: labeled trace windows -> (features, target current) rows.

Each row maps (state_duration_s, vlc_payload_bytes, ble_payload_bytes) to the
mean window current in microamps.  The CSV layout is fixed and versioned:

    # riot-energy-lab v1
    state_duration_s,vlc_payload_bytes,ble_payload_bytes,current_uA
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .node import BLE_TX_SLOT_S, NodePowerCalibration, NodeState, node_state_power
from .traces import CurrentTrace

DATASET_FORMAT_TAG = "# riot-energy-lab v1"
DATASET_HEADER = "state_duration_s,vlc_payload_bytes,ble_payload_bytes,current_uA"

VLC_CHUNK_BYTES = 4  # one 32-bit chunk
VLC_CHUNK_S = 0.068
VLC_ENCODE_OVERHEAD_S = 0.5  # frame setup before the first chunk
BLE_ATT_CHUNK_BYTES = 20

DEFAULT_NODE_SUPPLY_V = 3.0


@dataclass(frozen=True)
class DatasetRow:
    state_duration_s: float
    vlc_payload_bytes: float
    ble_payload_bytes: float
    current_ua: float

    def __post_init__(self):
        if self.state_duration_s < 0 or self.vlc_payload_bytes < 0 or self.ble_payload_bytes < 0:
            raise ValidationError("dataset features must be nonnegative")
        if not math.isfinite(self.current_ua):
            raise ValidationError("dataset target must be finite")

    def features(self) -> tuple[float, float, float]:
        return (self.state_duration_s, self.vlc_payload_bytes, self.ble_payload_bytes)


@dataclass(frozen=True)
class TraceWindow:
    """A labeled span of a trace: the unit a dataset row is built from."""

    start_s: float
    duration_s: float
    tags: dict[str, float]  # must carry the three feature keys

    FEATURE_KEYS = ("state_duration_s", "vlc_payload_bytes", "ble_payload_bytes")


def build_dataset(
    labeled: list[tuple[CurrentTrace, list[TraceWindow]]],
) -> tuple[list[DatasetRow], int]:
    """One row per labeled window; returns (rows, n_skipped_unlabeled)."""
    rows: list[DatasetRow] = []
    skipped = 0
    for trace, windows in labeled:
        for w in windows:
            if any(k not in w.tags for k in TraceWindow.FEATURE_KEYS):
                skipped += 1
                continue
            i0 = int(round(w.start_s * trace.sample_rate_hz))
            i1 = int(round((w.start_s + w.duration_s) * trace.sample_rate_hz))
            i0, i1 = max(i0, 0), min(i1, trace.n_samples)
            if i1 <= i0:
                skipped += 1
                continue
            rows.append(
                DatasetRow(
                    state_duration_s=w.tags["state_duration_s"],
                    vlc_payload_bytes=w.tags["vlc_payload_bytes"],
                    ble_payload_bytes=w.tags["ble_payload_bytes"],
                    current_ua=float(np.mean(trace.samples_ua[i0:i1])),
                )
            )
    return rows, skipped


def vlc_tx_seconds(payload_bytes: float) -> float:
    """Airtime of a VLC payload: encode overhead plus 32-bit chunks."""
    if payload_bytes <= 0:
        return 0.0
    return VLC_ENCODE_OVERHEAD_S + math.ceil(payload_bytes / VLC_CHUNK_BYTES) * VLC_CHUNK_S


def ble_tx_seconds(payload_bytes: float) -> float:
    """Airtime of a BLE payload: one connection-event slot per ATT chunk."""
    if payload_bytes <= 0:
        return 0.0
    return math.ceil(payload_bytes / BLE_ATT_CHUNK_BYTES) * BLE_TX_SLOT_S


def window_mean_current_ua(
    state_duration_s: float,
    vlc_payload_bytes: float,
    ble_payload_bytes: float,
    calibration: NodePowerCalibration,
    supply_voltage_v: float = DEFAULT_NODE_SUPPLY_V,
    baseline_state: NodeState = NodeState.BLE_CONNECTED_IDLE,
) -> float:
    """Exact mean node current over one operation window.

    The node transmits the VLC and BLE payloads and spends the remainder in
    ``baseline_state``; transmissions are truncated proportionally when they
    do not fit in the window.
    """
    if state_duration_s <= 0:
        raise ValidationError("state_duration_s must be positive")
    t_vlc = vlc_tx_seconds(vlc_payload_bytes)
    t_ble = ble_tx_seconds(ble_payload_bytes)
    total_tx = t_vlc + t_ble
    if total_tx > state_duration_s:
        scale = state_duration_s / total_tx
        t_vlc *= scale
        t_ble *= scale
    p_vlc = node_state_power(NodeState.VLC_TX_FRAME, calibration)
    p_ble = node_state_power(NodeState.BLE_TX, calibration)
    p_idle = node_state_power(baseline_state, calibration)
    t_idle = state_duration_s - t_vlc - t_ble
    avg_mw = (t_vlc * p_vlc + t_ble * p_ble + t_idle * p_idle) / state_duration_s
    return avg_mw / supply_voltage_v * 1e3  # mW at V volts -> uA


DEFAULT_DURATION_CHOICES_S = (0.5, 1.0, 2.0, 4.0)
DEFAULT_VLC_STEP_BYTES = 16
DEFAULT_VLC_MAX_BYTES = 96
DEFAULT_BLE_STEP_BYTES = 40
DEFAULT_BLE_MAX_BYTES = 240


def gen_dataset(
    n_rows: int,
    seed: int,
    calibration: NodePowerCalibration,
    noise_sigma_ua: float = 20.0,
    supply_voltage_v: float = DEFAULT_NODE_SUPPLY_V,
    duration_choices_s: tuple[float, ...] = DEFAULT_DURATION_CHOICES_S,
    baseline_state: NodeState = NodeState.BLE_CONNECTED_IDLE,
) -> list[DatasetRow]:
    """Simulator-generated dataset of operation windows.

    Samples (duration, VLC payload, BLE payload) configurations from the
    seeded generator, computes each window's exact mean current from the
    calibration, and adds Gaussian measurement noise.
    """
    if n_rows < 1:
        raise ValidationError("n_rows must be >= 1")
    rng = np.random.default_rng(seed)
    durations = rng.choice(np.asarray(duration_choices_s, dtype=float), n_rows)
    vlc = rng.integers(0, DEFAULT_VLC_MAX_BYTES // DEFAULT_VLC_STEP_BYTES + 1, n_rows) * DEFAULT_VLC_STEP_BYTES
    ble = rng.integers(0, DEFAULT_BLE_MAX_BYTES // DEFAULT_BLE_STEP_BYTES + 1, n_rows) * DEFAULT_BLE_STEP_BYTES
    noise = rng.normal(0.0, noise_sigma_ua, n_rows) if noise_sigma_ua > 0 else np.zeros(n_rows)
    rows = []
    for i in range(n_rows):
        mean_ua = window_mean_current_ua(
            float(durations[i]), float(vlc[i]), float(ble[i]), calibration,
            supply_voltage_v, baseline_state,
        )
        rows.append(
            DatasetRow(float(durations[i]), float(vlc[i]), float(ble[i]), mean_ua + float(noise[i]))
        )
    return rows


# --- CSV IO -------------------------------------------------------------------


def write_dataset(rows: list[DatasetRow], path: str | Path) -> None:
    with Path(path).open("w") as fh:
        fh.write(DATASET_FORMAT_TAG + "\n")
        fh.write(DATASET_HEADER + "\n")
        for r in rows:
            fh.write(
                f"{r.state_duration_s:.6g},{r.vlc_payload_bytes:.6g},"
                f"{r.ble_payload_bytes:.6g},{r.current_ua:.6g}\n"
            )


def read_dataset(path: str | Path) -> list[DatasetRow]:
    rows = []
    with Path(path).open() as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if line == DATASET_HEADER:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ValidationError(f"bad dataset row: {line!r}")
            rows.append(DatasetRow(*(float(p) for p in parts)))
    return rows


def rows_to_arrays(rows: list[DatasetRow]) -> tuple[np.ndarray, np.ndarray]:
    """(X, y) feature matrix and target vector."""
    X = np.array([r.features() for r in rows], dtype=float)
    y = np.array([r.current_ua for r in rows], dtype=float)
    return X, y
