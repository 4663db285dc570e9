"""Energy-harvesting simulation with supercapacitor charge/discharge dynamics.

The storage element is an ideal supercapacitor (E = 1/2 C V^2) fed by an RF
or light harvester described as a piecewise-constant input power profile and
drained by the node load timeline.  Integration is forward Euler on
dV/dt = (P_in - P_load) / (C V) with a fixed 10 ms substep, which the test
suite validates against the closed-form energy balance.

When the voltage falls to the cutoff the node halts: the load drops to the
configured halt power (deep-sleep class) until the harvester lifts the
voltage back above the cutoff.  Each downward crossing is reported as a
depletion event.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ValidationError
from .scenarios import POWER_MILLIWATTS, Timeline

HARVEST_SUBSTEP_S = 0.010

HARVEST_RF = "rf"
HARVEST_LIGHT = "light"


@dataclass(frozen=True)
class HarvestConfig:
    """Harvest source and supercap parameters.

    ``input_power_mw`` is either a constant or a piecewise-constant profile
    given as (t_start_s, power_mw) breakpoints sorted by time.
    """

    source: str = HARVEST_LIGHT
    input_power_mw: float | tuple[tuple[float, float], ...] = 0.0
    capacitance_f: float = 1.0
    v_init: float = 2.5
    v_max: float = 2.7
    v_cutoff: float = 1.8
    halt_load_mw: float = 0.02  # deep-sleep-class draw while halted

    def __post_init__(self):
        if self.source not in (HARVEST_RF, HARVEST_LIGHT):
            raise ValidationError(f"unknown harvest source {self.source!r}")
        if not self.capacitance_f > 0:
            raise ValidationError("capacitance must be positive")
        if not 0 <= self.v_cutoff < self.v_init <= self.v_max:
            raise ValidationError(
                "supercap voltages must satisfy 0 <= v_cutoff < v_init <= v_max"
            )

    def power_breakpoints(self, horizon_s: float) -> list[tuple[float, float]]:
        if isinstance(self.input_power_mw, (int, float)):
            return [(0.0, float(self.input_power_mw))]
        pts = sorted((float(t), float(p)) for t, p in self.input_power_mw)
        if not pts or pts[0][0] > 0.0:
            pts.insert(0, (0.0, 0.0))
        return [p for p in pts if p[0] < horizon_s]


@dataclass
class HarvestResult:
    times_s: np.ndarray  # voltage trace sample times (segment boundaries)
    voltages: np.ndarray
    depletion_events: list[float] = field(default_factory=list)  # cutoff-crossing times

    @property
    def v_end(self) -> float:
        return float(self.voltages[-1])


def simulate_harvest(timeline: Timeline, cfg: HarvestConfig) -> HarvestResult:
    """Simulate the supercap voltage over a node load timeline.

    The timeline must be power-based (node scenarios).  Returns the voltage
    at every load/harvest boundary plus all depletion events.
    """
    if timeline.value_kind != POWER_MILLIWATTS:
        raise ValidationError("harvest simulation requires a power-based (node) timeline")
    starts, durs, loads_mw = timeline.arrays()
    horizon = float(starts[-1] + durs[-1])

    # merge load segment boundaries with harvest profile breakpoints
    harvest_pts = cfg.power_breakpoints(horizon)
    boundaries = sorted(
        {0.0, horizon}
        | {float(t) for t in starts}
        | {t for t, _ in harvest_pts}
    )
    harvest_t = np.array([t for t, _ in harvest_pts])
    harvest_p = np.array([p for _, p in harvest_pts])

    v = cfg.v_init
    halted = False
    times = [0.0]
    volts = [v]
    events: list[float] = []

    for left, right in zip(boundaries[:-1], boundaries[1:]):
        seg = right - left
        if seg <= 0:
            continue
        li = min(int(np.searchsorted(starts, left, side="right")) - 1, len(loads_mw) - 1)
        hi = max(int(np.searchsorted(harvest_t, left, side="right")) - 1, 0)
        p_in = float(harvest_p[hi])
        remaining = seg
        t_cursor = left
        while remaining > 1e-12:
            if halted:
                # the node draws only its halt load; recover substep by
                # substep and resume the moment V rises above the cutoff
                p_net_w = (p_in - cfg.halt_load_mw) / 1e3
                if p_net_w <= 0:
                    t_cursor += remaining  # pinned at the floor
                    remaining = 0.0
                    break
                h = min(HARVEST_SUBSTEP_S, remaining)
                v = min(v + h * p_net_w / (cfg.capacitance_f * v), cfg.v_max)
                t_cursor += h
                remaining -= h
                if v > cfg.v_cutoff:
                    halted = False
                continue
            p_net_w = (p_in - float(loads_mw[li])) / 1e3
            v_end, used, hit = _kernels.supercap_advance(
                v, p_net_w, cfg.capacitance_f, remaining, HARVEST_SUBSTEP_S,
                cfg.v_cutoff, cfg.v_max,
            )
            v = v_end
            t_cursor += used
            remaining -= used
            if hit == 1:
                if cfg.v_cutoff <= 0.0:
                    raise ValidationError(
                        "supercap voltage reached 0 V with v_cutoff=0; "
                        "the dV/dt = P/(C*V) model diverges at V=0"
                    )
                halted = True
                events.append(t_cursor)
            elif hit == 2 and p_net_w > 0:
                # clamped at v_max; surplus harvest is discarded
                t_cursor += remaining
                remaining = 0.0
        times.append(right)
        volts.append(v)

    return HarvestResult(np.asarray(times), np.asarray(volts), events)
