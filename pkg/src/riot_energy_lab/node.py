"""Per-state power table for the reconfigurable IoT node.

Node energy is modeled as an average power (mW) per operating state.  The
shipped table is fitted (nonnegative least squares, see ``calibrate``) so
that 24-hour simulations of the built-in duty-cycle profiles reproduce the
published scenario energy totals; entries the fit cannot identify are pinned
from physically motivated priors and tagged as such.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import CalibrationIncompleteError, ValidationError


class NodeState(Enum):
    STARTUP = "startup"
    BLE_ADVERTISING_FAST = "ble_advertising_fast"
    BLE_CONNECTED_IDLE = "ble_connected_idle"
    BLE_CONNECTED_IDLE_VLC_LISTENING = "ble_connected_idle_vlc_listening"
    BME_INIT = "bme_init"
    SENSING = "sensing"
    EINK_UPDATE = "eink_update"
    VLC_TX_FRAME = "vlc_tx_frame"
    BLE_TX = "ble_tx"
    BLE_RX = "ble_rx"
    IDLE = "idle"
    IDLE_VLC_LISTENING = "idle_vlc_listening"
    DEEP_SLEEP = "deep_sleep"
    WAKE_UP = "wake_up"


_BY_VALUE = {s.value: s for s in NodeState}


def node_state_from_name(name: str) -> NodeState:
    try:
        return _BY_VALUE[name]
    except KeyError:
        raise ValidationError(f"unknown node state {name!r}") from None


@dataclass
class NodePowerCalibration:
    """Average power (mW) per node state, with a provenance tag per entry.

    Provenance is ``"fit"`` for least-squares-derived entries, ``"prior"``
    for pinned physical priors, or free-form for user-supplied tables.
    """

    powers_mw: dict[NodeState, float] = field(default_factory=dict)
    provenance: dict[NodeState, str] = field(default_factory=dict)

    def __post_init__(self):
        for state, p in self.powers_mw.items():
            if p < 0:
                raise ValidationError(f"negative power for {state.value}: {p} mW")
            self.provenance.setdefault(state, "unspecified")
        self._check_ordering()

    def _check_ordering(self):
        """Sleep < plain idle < VLC-listening idle, when all are present."""
        chain = (NodeState.DEEP_SLEEP, NodeState.IDLE, NodeState.IDLE_VLC_LISTENING)
        if all(s in self.powers_mw for s in chain):
            a, b, c = (self.powers_mw[s] for s in chain)
            if not a < b < c:
                raise ValidationError(
                    "power ordering violated: requires "
                    f"deep_sleep ({a}) < idle ({b}) < idle_vlc_listening ({c})"
                )

    def power_mw(self, state: NodeState) -> float:
        if state not in self.powers_mw:
            raise CalibrationIncompleteError([state])
        return self.powers_mw[state]

    def with_entry(self, state: NodeState, power_mw: float, provenance: str) -> "NodePowerCalibration":
        powers = dict(self.powers_mw)
        prov = dict(self.provenance)
        powers[state] = power_mw
        prov[state] = provenance
        return NodePowerCalibration(powers, prov)


def node_state_power(state: NodeState, calib: NodePowerCalibration) -> float:
    """Calibrated average power (mW) of a node state."""
    return calib.power_mw(state)


# --- built-in scenario structure ------------------------------------------
#
# The five built-in node profiles, as (state, duration_s) sequences.  For
# profile 1 the gateway drives the schedule, so the repetition period runs
# command-start to command-start and the node idles (VLC listening) in the
# gap.  Profiles 2-5 list their rest state as an explicit trailing segment,
# so the period is active time + rest time.

PERIOD_COMMAND_TO_COMMAND = "command_to_command"
PERIOD_ACTIVE_PLUS_SLEEP = "active_plus_sleep"

# One BLE data transfer occupies a single connection-event slot at the
# 45 ms connection interval.
BLE_TX_SLOT_S = 0.045

_PREAMBLE_BLE = (
    (NodeState.BLE_ADVERTISING_FAST, 10.0),
    (NodeState.BLE_CONNECTED_IDLE, 5.0),
    (NodeState.BME_INIT, 0.916),
    (NodeState.BLE_CONNECTED_IDLE, 10.0),
)


@dataclass(frozen=True)
class ScenarioRecipe:
    """Fixed state/duration structure of one built-in scenario."""

    scenario_id: int
    description: str
    preamble: tuple[tuple[NodeState, float], ...]
    cycle: tuple[tuple[NodeState, float], ...]
    period_mode: str
    rest_state: NodeState

    @property
    def cycle_active_s(self) -> float:
        return sum(d for _, d in self.cycle)

    @property
    def preamble_s(self) -> float:
        return sum(d for _, d in self.preamble)


STATE_DURATION_CATALOG: dict[int, ScenarioRecipe] = {
    1: ScenarioRecipe(
        1,
        "BLE+VLC on, node continuously listens for gateway commands",
        _PREAMBLE_BLE,
        (
            (NodeState.SENSING, 0.516),
            (NodeState.IDLE_VLC_LISTENING, 1.0),
            (NodeState.EINK_UPDATE, 0.435),
            (NodeState.IDLE_VLC_LISTENING, 1.0),
            (NodeState.VLC_TX_FRAME, 0.908),
        ),
        PERIOD_COMMAND_TO_COMMAND,
        NodeState.IDLE_VLC_LISTENING,
    ),
    2: ScenarioRecipe(
        2,
        "BLE+VLC on, periodic duty cycle, no command listening",
        _PREAMBLE_BLE,
        (
            (NodeState.SENSING, 0.516),
            (NodeState.BLE_CONNECTED_IDLE, 1.0),
            (NodeState.EINK_UPDATE, 0.435),
            (NodeState.BLE_CONNECTED_IDLE, 1.0),
            (NodeState.VLC_TX_FRAME, 0.908),
        ),
        PERIOD_ACTIVE_PLUS_SLEEP,
        NodeState.BLE_CONNECTED_IDLE,
    ),
    3: ScenarioRecipe(
        3,
        "BLE only, periodic duty cycle, uplink over BLE",
        _PREAMBLE_BLE,
        (
            (NodeState.SENSING, 0.516),
            (NodeState.BLE_CONNECTED_IDLE, 1.0),
            (NodeState.EINK_UPDATE, 0.435),
            (NodeState.BLE_CONNECTED_IDLE, 1.0),
            (NodeState.BLE_TX, BLE_TX_SLOT_S),
        ),
        PERIOD_ACTIVE_PLUS_SLEEP,
        NodeState.BLE_CONNECTED_IDLE,
    ),
    4: ScenarioRecipe(
        4,
        "VLC only, periodic duty cycle with deep sleep",
        (),
        (
            (NodeState.STARTUP, 0.911),
            (NodeState.IDLE, 0.030),
            (NodeState.SENSING, 0.149),
            (NodeState.IDLE, 0.250),
            (NodeState.EINK_UPDATE, 0.450),
            (NodeState.IDLE, 0.250),
            (NodeState.VLC_TX_FRAME, 0.908),
        ),
        PERIOD_ACTIVE_PLUS_SLEEP,
        NodeState.IDLE,
    ),
    5: ScenarioRecipe(
        5,
        "Sensing and display only, deep sleep between cycles",
        (),
        (
            (NodeState.STARTUP, 0.909),
            (NodeState.IDLE, 0.030),
            (NodeState.SENSING, 0.149),
            (NodeState.IDLE, 0.250),
            (NodeState.EINK_UPDATE, 0.544),
        ),
        PERIOD_ACTIVE_PLUS_SLEEP,
        NodeState.DEEP_SLEEP,
    ),
}

BUILTIN_PERIODS_S = {"1m": 60.0, "1h": 3600.0}

# 24-hour reference energies (J) per (scenario_id, period) used to fit the
# shipped calibration.
REFERENCE_TOTALS_24H_J: tuple[tuple[int, float, float], ...] = (
    (1, 60.0, 1611.0),
    (1, 3600.0, 1585.0),
    (2, 60.0, 500.0),
    (2, 3600.0, 467.0),
    (3, 60.0, 486.0),
    (3, 3600.0, 467.0),
    (4, 60.0, 158.0),
    (4, 3600.0, 59.0),
    (5, 60.0, 78.0),
    (5, 3600.0, 3.0),
)


# --- calibration file IO ----------------------------------------------------

_CALIB_HEADER = "# riot-energy-lab node calibration v1 (state = power_mw provenance)"


def write_calibration(calib: NodePowerCalibration, path: str | Path) -> None:
    lines = [_CALIB_HEADER]
    for state in NodeState:
        if state in calib.powers_mw:
            lines.append(
                f"{state.value} = {calib.powers_mw[state]:.6f} {calib.provenance[state]}"
            )
    Path(path).write_text("\n".join(lines) + "\n")


def read_calibration(path: str | Path) -> NodePowerCalibration:
    powers: dict[NodeState, float] = {}
    prov: dict[NodeState, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            key, rest = (t.strip() for t in line.split("=", 1))
            value_s, tag = rest.split()
        except ValueError:
            raise ValidationError(f"bad calibration line: {raw!r}") from None
        state = node_state_from_name(key)
        powers[state] = float(value_s)
        prov[state] = tag
    return NodePowerCalibration(powers, prov)


def shipped_calibration() -> NodePowerCalibration:
    """The calibration distributed with the package."""
    return read_calibration(Path(__file__).parent / "data" / "calibration" / "node_powers.txt")
