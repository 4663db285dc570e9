"""Scenario engine: expand duty-cycle definitions into absolute timelines.

A scenario is a preamble (run once) plus a cycle of state segments repeated
over a horizon, either periodically, as seeded Poisson-triggered events, or
once.  Expansion produces a gap-free piecewise-constant ``Timeline`` whose
segments carry power (node states, mW) or current (AP operating points, mA);
``integrate`` then gives exact energy/charge totals.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import yaml

from .errors import UnitError, ValidationError
from .gateway import (
    ApBaseConstants,
    ApOperatingPoint,
    BleDataPhase,
    BleMode,
    VlcMode,
    ap_operating_current,
)
from .node import (
    BUILTIN_PERIODS_S,
    PERIOD_ACTIVE_PLUS_SLEEP,
    PERIOD_COMMAND_TO_COMMAND,
    STATE_DURATION_CATALOG,
    NodePowerCalibration,
    NodeState,
    node_state_from_name,
    node_state_power,
)

ScenarioState = Union[NodeState, ApOperatingPoint]

POWER_MILLIWATTS = "power_mW"
CURRENT_MILLIAMPS = "current_mA"


@dataclass(frozen=True)
class StateSegment:
    state: ScenarioState
    duration_s: float

    def __post_init__(self):
        if not self.duration_s > 0:
            raise ValidationError(f"segment duration must be positive, got {self.duration_s}")


@dataclass(frozen=True)
class Periodic:
    period_s: float


@dataclass(frozen=True)
class RandomPoisson:
    mean_rate_per_s: float
    seed: int = 0


@dataclass(frozen=True)
class Once:
    pass


Repetition = Union[Periodic, RandomPoisson, Once]


@dataclass(frozen=True)
class Scenario:
    """A repeatable operation profile for a node or an AP."""

    name: str
    preamble: tuple[StateSegment, ...]
    cycle: tuple[StateSegment, ...]
    repetition: Repetition
    horizon_s: float
    filler_state: ScenarioState | None = None  # fills gaps between cycles

    def __post_init__(self):
        if not self.horizon_s > 0:
            raise ValidationError("horizon_s must be positive")
        if isinstance(self.repetition, Periodic):
            active = sum(seg.duration_s for seg in self.cycle)
            if active > self.repetition.period_s + 1e-12:
                raise ValidationError(
                    f"cycle active time {active:.3f}s exceeds period "
                    f"{self.repetition.period_s:.3f}s"
                )
            if self.filler_state is None and active < self.repetition.period_s - 1e-12:
                raise ValidationError("periodic scenario with idle gaps needs a filler_state")

    @property
    def is_node_scenario(self) -> bool:
        for seg in list(self.preamble) + list(self.cycle):
            return isinstance(seg.state, NodeState)
        return isinstance(self.filler_state, NodeState)


@dataclass(frozen=True)
class TimelineEntry:
    t_start_s: float
    duration_s: float
    value: float  # mW or mA depending on the timeline's value_kind
    label: str


@dataclass
class Timeline:
    """Gap-free, non-overlapping piecewise-constant schedule."""

    value_kind: str  # POWER_MILLIWATTS or CURRENT_MILLIAMPS
    entries: list[TimelineEntry]
    total_duration_s: float

    def __post_init__(self):
        if self.value_kind not in (POWER_MILLIWATTS, CURRENT_MILLIAMPS):
            raise ValidationError(f"unknown value kind {self.value_kind!r}")
        t = 0.0
        for e in self.entries:
            if e.t_start_s < t - 1e-9:
                raise ValidationError("timeline entries overlap or are unordered")
            t = e.t_start_s + e.duration_s

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(t_start_s, duration_s, value) as float64 arrays."""
        n = len(self.entries)
        t = np.empty(n)
        d = np.empty(n)
        v = np.empty(n)
        for i, e in enumerate(self.entries):
            t[i] = e.t_start_s
            d[i] = e.duration_s
            v[i] = e.value
        return t, d, v

    def state_seconds(self) -> dict[str, float]:
        """Total seconds spent per segment label."""
        acc: dict[str, float] = {}
        for e in self.entries:
            acc[e.label] = acc.get(e.label, 0.0) + e.duration_s
        return acc


@dataclass(frozen=True)
class IntegrationResult:
    energy_j: float
    charge_c: float | None
    avg_power_mw: float | None
    avg_current_ma: float | None


def _expand_structure(s: Scenario) -> list[tuple[ScenarioState, float, float]]:
    """(state, t_start, duration) triples covering [0, horizon] gap-free."""
    out: list[tuple[ScenarioState, float, float]] = []
    t = 0.0

    def emit(state: ScenarioState, duration: float) -> float:
        nonlocal t
        d = min(duration, s.horizon_s - t)
        if d > 1e-12:
            out.append((state, t, d))
            t += d
        return d

    for seg in s.preamble:
        emit(seg.state, seg.duration_s)
        if t >= s.horizon_s:
            return out

    def emit_cycle():
        for seg in s.cycle:
            emit(seg.state, seg.duration_s)
            if t >= s.horizon_s:
                break

    def fill_until(target: float):
        if target > t + 1e-12:
            if s.filler_state is None:
                raise ValidationError("scenario leaves gaps but has no filler_state")
            emit(s.filler_state, target - t)

    rep = s.repetition
    if isinstance(rep, Once):
        emit_cycle()
        fill_until(s.horizon_s)
    elif isinstance(rep, Periodic):
        t0 = t
        k = 0
        while t0 + k * rep.period_s < s.horizon_s - 1e-12:
            emit_cycle()
            next_start = min(t0 + (k + 1) * rep.period_s, s.horizon_s)
            fill_until(next_start)
            k += 1
        fill_until(s.horizon_s)
    elif isinstance(rep, RandomPoisson):
        rng = np.random.default_rng(rep.seed)
        if rep.mean_rate_per_s > 0:
            start = t + float(rng.exponential(1.0 / rep.mean_rate_per_s))
            while start < s.horizon_s - 1e-12:
                fill_until(start)
                emit_cycle()
                gap = float(rng.exponential(1.0 / rep.mean_rate_per_s))
                # next event no earlier than the end of the current cycle
                start = max(start + gap, t)
        fill_until(s.horizon_s)
    else:  # pragma: no cover
        raise ValidationError(f"unknown repetition {rep!r}")
    return out


def expand_scenario(
    s: Scenario,
    calibration: NodePowerCalibration | None = None,
    ap_constants: ApBaseConstants | None = None,
) -> Timeline:
    """Expand a scenario into an absolute timeline of power/current segments.

    Node scenarios need a power ``calibration``; AP scenarios use the gateway
    current models (optionally with overridden ``ap_constants``).
    """
    structure = _expand_structure(s)
    if not structure:
        raise ValidationError("scenario expands to an empty timeline")

    node_based = isinstance(structure[0][0], NodeState)
    entries: list[TimelineEntry] = []
    cache: dict[ScenarioState, tuple[float, str]] = {}
    for state, t_start, duration in structure:
        if state not in cache:
            if isinstance(state, NodeState):
                if not node_based:
                    raise ValidationError("cannot mix node states and AP points in one scenario")
                if calibration is None:
                    raise ValidationError("node scenario expansion requires a power calibration")
                cache[state] = (node_state_power(state, calibration), state.value)
            else:
                if node_based:
                    raise ValidationError("cannot mix node states and AP points in one scenario")
                cache[state] = (ap_operating_current(state, ap_constants), _ap_label(state))
        value, label = cache[state]
        entries.append(TimelineEntry(t_start, duration, value, label))

    kind = POWER_MILLIWATTS if node_based else CURRENT_MILLIAMPS
    total = entries[-1].t_start_s + entries[-1].duration_s
    return Timeline(kind, entries, total)


def _ap_label(p: ApOperatingPoint) -> str:
    if p.booting:
        return "boot"
    bits = [f"vlc_{p.vlc.kind}"]
    if p.vlc.kind != "off":
        bits.append(f"{p.vlc.pwm_duty_pct:g}%")
    bits.append(f"ble_{p.ble.kind}")
    if p.ble.kind == "connected" and p.ble.data_phase != BleDataPhase.IDLE:
        bits.append(p.ble.data_phase.value)
    if p.eth_tx_active:
        bits.append("eth_tx")
    return "+".join(bits)


def concat_timelines(a: Timeline, b: Timeline) -> Timeline:
    """Append ``b`` after ``a`` (shifting its start times)."""
    if a.value_kind != b.value_kind:
        raise ValidationError("cannot concatenate timelines with different value kinds")
    shifted = [
        TimelineEntry(e.t_start_s + a.total_duration_s, e.duration_s, e.value, e.label)
        for e in b.entries
    ]
    return Timeline(a.value_kind, list(a.entries) + shifted, a.total_duration_s + b.total_duration_s)


def integrate(t: Timeline, supply_voltage_v: float | None = None) -> IntegrationResult:
    """Exact piecewise-constant totals: energy (J), charge (C), averages.

    Power timelines yield charge only when a supply voltage is given;
    current timelines require the voltage (energy is otherwise undefined).
    """
    if not t.entries:
        raise ValidationError("cannot integrate an empty timeline")
    _, dur, val = t.arrays()
    weighted = float(np.dot(dur, val))
    total_s = float(np.sum(dur))
    if t.value_kind == POWER_MILLIWATTS:
        energy_j = weighted / 1e3
        avg_power = weighted / total_s
        charge = energy_j / supply_voltage_v if supply_voltage_v else None
        avg_current = (
            avg_power / supply_voltage_v if supply_voltage_v else None
        )  # mW / V = mA
        return IntegrationResult(energy_j, charge, avg_power, avg_current)
    if supply_voltage_v is None:
        raise UnitError("current-based timeline needs supply_voltage_v to compute energy")
    charge = weighted / 1e3  # mA*s -> C
    energy_j = charge * supply_voltage_v
    avg_current = weighted / total_s
    return IntegrationResult(energy_j, charge, energy_j / total_s * 1e3, avg_current)


def current_at(t: Timeline, times_s: np.ndarray) -> np.ndarray:
    """Timeline value at each query time (left-closed segments)."""
    starts, dur, val = t.arrays()
    idx = np.searchsorted(starts, times_s, side="right") - 1
    idx = np.clip(idx, 0, len(starts) - 1)
    out = val[idx]
    beyond = times_s >= starts[-1] + dur[-1]
    out[beyond] = val[-1]
    return out


# --- built-in scenarios ------------------------------------------------------


def builtin_scenarios(horizon_s: float = 86400.0) -> list[Scenario]:
    """The ten built-in node profiles (five scenarios x two periods)."""
    out = []
    for sid in sorted(STATE_DURATION_CATALOG):
        for tag, period in BUILTIN_PERIODS_S.items():
            out.append(make_builtin(sid, tag, horizon_s))
    return out


def make_builtin(scenario_id: int, period_tag: str, horizon_s: float = 86400.0) -> Scenario:
    if scenario_id not in STATE_DURATION_CATALOG:
        raise ValidationError(f"no built-in scenario {scenario_id}")
    if period_tag not in BUILTIN_PERIODS_S:
        raise ValidationError(f"unknown period tag {period_tag!r} (use 1m or 1h)")
    recipe = STATE_DURATION_CATALOG[scenario_id]
    rest_s = BUILTIN_PERIODS_S[period_tag]
    preamble = tuple(StateSegment(st, d) for st, d in recipe.preamble)
    cycle = [StateSegment(st, d) for st, d in recipe.cycle]
    if recipe.period_mode == PERIOD_ACTIVE_PLUS_SLEEP:
        cycle.append(StateSegment(recipe.rest_state, rest_s))
        period = recipe.cycle_active_s + rest_s
    elif recipe.period_mode == PERIOD_COMMAND_TO_COMMAND:
        period = rest_s
    else:  # pragma: no cover
        raise ValidationError(f"unknown period mode {recipe.period_mode}")
    return Scenario(
        name=f"builtin:{scenario_id}{period_tag[-1]}",
        preamble=preamble,
        cycle=tuple(cycle),
        repetition=Periodic(period),
        horizon_s=horizon_s,
        filler_state=recipe.rest_state,
    )


def parse_builtin_ref(ref: str, horizon_s: float = 86400.0) -> Scenario:
    """Parse ``builtin:<id><m|h>`` (e.g. ``builtin:5h``) into a scenario."""
    body = ref.split(":", 1)[1] if ref.startswith("builtin:") else ref
    if len(body) < 2 or not body[:-1].isdigit() or body[-1] not in "mh":
        raise ValidationError(f"bad built-in scenario reference {ref!r} (expected e.g. builtin:1m)")
    return make_builtin(int(body[:-1]), "1" + body[-1], horizon_s)


# --- scenario files ----------------------------------------------------------

SCENARIO_SCHEMA_VERSION = 1


def scenario_to_dict(s: Scenario) -> dict:
    def seg(e: StateSegment) -> dict:
        if isinstance(e.state, NodeState):
            return {"state": e.state.value, "duration_s": e.duration_s}
        return {"ap": _ap_point_to_dict(e.state), "duration_s": e.duration_s}

    rep: dict
    if isinstance(s.repetition, Periodic):
        rep = {"mode": "periodic", "period_s": s.repetition.period_s}
    elif isinstance(s.repetition, RandomPoisson):
        rep = {
            "mode": "poisson",
            "rate_per_s": s.repetition.mean_rate_per_s,
            "seed": s.repetition.seed,
        }
    else:
        rep = {"mode": "once"}
    d = {
        "version": SCENARIO_SCHEMA_VERSION,
        "name": s.name,
        "horizon_s": s.horizon_s,
        "repeat": rep,
        "preamble": [seg(e) for e in s.preamble],
        "cycle": [seg(e) for e in s.cycle],
    }
    if s.filler_state is not None:
        d["filler"] = (
            s.filler_state.value
            if isinstance(s.filler_state, NodeState)
            else _ap_point_to_dict(s.filler_state)
        )
    return d


def scenario_from_dict(d: dict, horizon_override_s: float | None = None) -> Scenario:
    try:
        rep_d = d.get("repeat", {"mode": "once"})
        mode = rep_d.get("mode", "once")
        rep: Repetition
        if mode == "periodic":
            rep = Periodic(float(rep_d["period_s"]))
        elif mode == "poisson":
            rep = RandomPoisson(float(rep_d["rate_per_s"]), int(rep_d.get("seed", 0)))
        elif mode == "once":
            rep = Once()
        else:
            raise ValidationError(f"unknown repeat mode {mode!r}")

        def parse_seg(e: dict) -> StateSegment:
            if "state" in e:
                return StateSegment(node_state_from_name(e["state"]), float(e["duration_s"]))
            return StateSegment(_ap_point_from_dict(e["ap"]), float(e["duration_s"]))

        filler = d.get("filler")
        filler_state: ScenarioState | None = None
        if isinstance(filler, str):
            filler_state = node_state_from_name(filler)
        elif isinstance(filler, dict):
            filler_state = _ap_point_from_dict(filler)
        return Scenario(
            name=str(d.get("name", "unnamed")),
            preamble=tuple(parse_seg(e) for e in d.get("preamble", [])),
            cycle=tuple(parse_seg(e) for e in d.get("cycle", [])),
            repetition=rep,
            horizon_s=float(horizon_override_s or d.get("horizon_s", 86400.0)),
            filler_state=filler_state,
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed scenario definition: {exc}") from exc


def _ap_point_to_dict(p: ApOperatingPoint) -> dict:
    d: dict = {}
    if p.booting:
        d["boot"] = True
    if p.vlc.kind != "off":
        d["vlc"] = {"mode": p.vlc.kind, "duty_pct": p.vlc.pwm_duty_pct}
        if p.vlc.kind == "tx":
            d["vlc"]["chunks"] = p.vlc.n_chunks
    if p.ble.kind == "scanning":
        d["ble"] = {
            "mode": "scanning",
            "window_ms": p.ble.scan_window_ms,
            "interval_ms": p.ble.scan_interval_ms,
        }
    elif p.ble.kind == "connected":
        d["ble"] = {
            "mode": "connected",
            "interval_ms": p.ble.conn_interval_ms,
            "phase": p.ble.data_phase.value,
        }
    d["usb"] = p.usb_connected
    d["eth"] = p.eth_connected
    if p.eth_tx_active:
        d["eth_tx"] = True
    return d


def _ap_point_from_dict(d: dict) -> ApOperatingPoint:
    vlc = VlcMode.off()
    if "vlc" in d and d["vlc"] not in (None, "off"):
        v = d["vlc"]
        mode = v.get("mode", "idle")
        duty = float(v.get("duty_pct", 0.0))
        if mode == "idle":
            vlc = VlcMode.idle(duty)
        elif mode == "tx":
            vlc = VlcMode.tx(duty, int(v.get("chunks", 6)))
        elif mode == "rx":
            vlc = VlcMode.rx(duty)
        else:
            raise ValidationError(f"unknown VLC mode {mode!r}")
    ble = BleMode.off()
    if "ble" in d and d["ble"] not in (None, "off"):
        b = d["ble"]
        mode = b.get("mode")
        if mode == "scanning":
            ble = BleMode.scanning(float(b["window_ms"]), float(b["interval_ms"]))
        elif mode == "connected":
            ble = BleMode.connected(
                float(b.get("interval_ms", 45.0)), BleDataPhase(b.get("phase", "idle"))
            )
        else:
            raise ValidationError(f"unknown BLE mode {mode!r}")
    return ApOperatingPoint(
        vlc=vlc,
        ble=ble,
        usb_connected=bool(d.get("usb", True)),
        eth_connected=bool(d.get("eth", True)),
        eth_tx_active=bool(d.get("eth_tx", False)),
        booting=bool(d.get("boot", False)),
    )


def write_scenario(s: Scenario, path: str | Path) -> None:
    Path(path).write_text(yaml.safe_dump(scenario_to_dict(s), sort_keys=False))


def read_scenario(path: str | Path, horizon_override_s: float | None = None) -> Scenario:
    data = yaml.safe_load(Path(path).read_text())
    if not isinstance(data, dict):
        raise ValidationError(f"scenario file {path} does not contain a mapping")
    return scenario_from_dict(data, horizon_override_s)


def builtin_ap_profile(name: str = "ap-validation") -> Scenario:
    """Built-in AP operating-point sequences shipped with the package."""
    path = Path(__file__).parent / "data" / "ap_profiles" / f"{name}.yaml"
    if not path.exists():
        raise ValidationError(f"no built-in AP profile named {name!r}")
    return read_scenario(path)
