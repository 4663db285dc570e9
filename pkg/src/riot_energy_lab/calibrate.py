"""Fit per-state node powers to published 24-hour scenario energy totals.

Builds the linear system A p = e where A[i][s] is the number of seconds the
i-th scenario spends in state s over the horizon (from an exact timeline
expansion) and e holds the target energies in joules, then solves for the
nonnegative power vector p (in W) by NNLS.  Rows are scaled by 1/e_i so
every total counts equally in relative terms.

States the targets cannot identify are pinned to physically motivated prior
powers and tagged ``prior`` in the resulting calibration's provenance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from .errors import DataError, ValidationError
from .node import (
    STATE_DURATION_CATALOG,
    NodePowerCalibration,
    NodeState,
    ScenarioRecipe,
)
from .scenarios import Scenario

# Priors (mW) for states the reference totals leave unconstrained or nearly
# collinear; values are plausible for a BLE SoC-class node at 3 V.
DEFAULT_PRIOR_POWERS_MW: dict[NodeState, float] = {
    NodeState.BLE_ADVERTISING_FAST: 6.6,  # 20 ms advertising interval
    NodeState.BME_INIT: 12.0,
    NodeState.EINK_UPDATE: 20.0,  # optimized refresh waveform
    NodeState.BLE_TX: 30.0,  # radio TX burst at 0 dBm
    NodeState.BLE_RX: 28.0,  # radio RX burst
    NodeState.BLE_CONNECTED_IDLE_VLC_LISTENING: 19.0,  # listening idle + connection upkeep
    NodeState.WAKE_UP: 0.05,  # light-sensing wake-up monitor
}

NNLS_RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class ResidualEntry:
    scenario_id: int
    period_s: float
    target_j: float
    achieved_j: float

    @property
    def relative_error(self) -> float:
        return (self.achieved_j - self.target_j) / self.target_j


@dataclass
class FitReport:
    calibration: NodePowerCalibration
    residuals: list[ResidualEntry]

    @property
    def max_abs_relative_error(self) -> float:
        return max(abs(r.relative_error) for r in self.residuals)

    def within_tolerance(self, rel_tol: float = 0.05) -> bool:
        """True when every total is reproduced within the relative tolerance."""
        return self.max_abs_relative_error <= rel_tol

    def summary(self) -> str:
        lines = ["scenario  period_s   target_J  achieved_J  rel_err"]
        for r in self.residuals:
            lines.append(
                f"{r.scenario_id:>8d}  {r.period_s:>8g}  {r.target_j:>9.1f}"
                f"  {r.achieved_j:>10.2f}  {r.relative_error:+8.2%}"
            )
        return "\n".join(lines)


def state_seconds_for_total(
    scenario_id: int, period_s: float, horizon_s: float = 86400.0
) -> dict[NodeState, float]:
    """Seconds per state of one built-in scenario over the horizon."""
    return _structure_seconds(
        _recipe_scenario(STATE_DURATION_CATALOG[scenario_id], period_s, horizon_s)
    )


def _structure_seconds(scenario: Scenario) -> dict[NodeState, float]:
    from .scenarios import _expand_structure

    acc: dict[NodeState, float] = {}
    for state, _, duration in _expand_structure(scenario):
        acc[state] = acc.get(state, 0.0) + duration
    return acc


def fit_calibration(
    scenario_totals: list[tuple[int, float, float]],
    catalog: dict[int, ScenarioRecipe] | None = None,
    pinned_mw: dict[NodeState, float] | None = None,
    horizon_s: float = 86400.0,
) -> FitReport:
    """Nonnegative least-squares calibration from (scenario, period, energy_J) totals.

    ``catalog`` defaults to the built-in duty-cycle structures; ``pinned_mw``
    defaults to :data:`DEFAULT_PRIOR_POWERS_MW` restricted to states the
    system cannot identify.  Raises :class:`DataError` when the remaining
    free states are rank-deficient, naming the indistinguishable states.
    """
    if not scenario_totals:
        raise ValidationError("need at least one scenario total")
    catalog = catalog if catalog is not None else STATE_DURATION_CATALOG
    for sid, _, energy in scenario_totals:
        if sid not in catalog:
            raise ValidationError(f"scenario id {sid} not in catalog")
        if not np.isfinite(energy) or energy <= 0:
            raise ValidationError(f"target energy must be positive and finite, got {energy}")

    states = list(NodeState)
    rows = []
    targets = []
    for sid, period_s, energy_j in scenario_totals:
        if catalog is STATE_DURATION_CATALOG:
            sec = state_seconds_for_total(sid, period_s, horizon_s)
        else:
            sec = _structure_seconds(_recipe_scenario(catalog[sid], period_s, horizon_s))
        rows.append([sec.get(s, 0.0) for s in states])
        targets.append(energy_j)
    A = np.asarray(rows, dtype=float)
    e = np.asarray(targets, dtype=float)

    used = A.sum(axis=0) > 0.0
    if pinned_mw is None:
        pinned_mw = _default_pins(states, used)
    pin_w = np.array([pinned_mw.get(s, 0.0) / 1e3 for s in states])
    free_mask = np.array([used[i] and states[i] not in pinned_mw for i in range(len(states))])
    free_idx = np.flatnonzero(free_mask)

    b = e - A @ pin_w
    Af = A[:, free_idx]
    if Af.shape[1] > 0:
        rank = np.linalg.matrix_rank(Af)
        if rank < Af.shape[1]:
            raise DataError(
                "targets cannot distinguish states "
                f"{_collinear_states(Af, [states[i] for i in free_idx])}; "
                "pin one of them to a prior value"
            )
        w = 1.0 / e
        p_free, _ = nnls(Af * w[:, None], b * w, maxiter=30 * max(Af.shape[1], 1))
    else:
        p_free = np.zeros(0)

    powers_w = pin_w.copy()
    powers_w[free_idx] = p_free
    achieved = A @ powers_w

    powers_mw: dict[NodeState, float] = {}
    provenance: dict[NodeState, str] = {}
    for i, s in enumerate(states):
        if s in pinned_mw:
            powers_mw[s] = pinned_mw[s]
            provenance[s] = "prior"
        elif used[i]:
            powers_mw[s] = powers_w[i] * 1e3
            provenance[s] = "fit"
    calibration = NodePowerCalibration(powers_mw, provenance)
    residuals = [
        ResidualEntry(sid, period_s, energy_j, float(achieved[i]))
        for i, (sid, period_s, energy_j) in enumerate(scenario_totals)
    ]
    return FitReport(calibration, residuals)


def _recipe_scenario(recipe: ScenarioRecipe, rest_s: float, horizon_s: float) -> Scenario:
    from .node import PERIOD_ACTIVE_PLUS_SLEEP
    from .scenarios import Periodic, StateSegment

    cycle = [StateSegment(st, d) for st, d in recipe.cycle]
    if recipe.period_mode == PERIOD_ACTIVE_PLUS_SLEEP:
        cycle.append(StateSegment(recipe.rest_state, rest_s))
        period = recipe.cycle_active_s + rest_s
    else:
        period = rest_s
    return Scenario(
        name=f"recipe:{recipe.scenario_id}@{rest_s:g}s",
        preamble=tuple(StateSegment(st, d) for st, d in recipe.preamble),
        cycle=tuple(cycle),
        repetition=Periodic(period),
        horizon_s=horizon_s,
        filler_state=recipe.rest_state,
    )


def _default_pins(states: list[NodeState], used: np.ndarray) -> dict[NodeState, float]:
    pins = {}
    for i, s in enumerate(states):
        if s in DEFAULT_PRIOR_POWERS_MW and (not used[i] or s in _ALWAYS_PINNED):
            pins[s] = DEFAULT_PRIOR_POWERS_MW[s]
    return pins


# Preamble-only states are mutually collinear across the built-in totals
# (every profile 1-3 row contains the same preamble), so they are always
# pinned; the same goes for the single-transfer states whose per-cycle
# seconds are too small to separate from the surrounding idle.
_ALWAYS_PINNED = frozenset(
    {
        NodeState.BLE_ADVERTISING_FAST,
        NodeState.BME_INIT,
        NodeState.EINK_UPDATE,
        NodeState.BLE_TX,
    }
)


def _collinear_states(Af: np.ndarray, free_states: list[NodeState]) -> list[str]:
    _, sv, vt = np.linalg.svd(Af)
    tol = max(Af.shape) * np.finfo(float).eps * (sv[0] if sv.size else 1.0)
    names: set[str] = set()
    for k in range(len(vt)):
        if k >= len(sv) or sv[k] <= tol:
            for j in np.flatnonzero(np.abs(vt[k]) > 1e-8):
                names.add(free_states[j].value)
    # columns entirely absent from sv (more states than rows)
    if Af.shape[1] > Af.shape[0]:
        for k in range(Af.shape[0], Af.shape[1]):
            for j in np.flatnonzero(np.abs(vt[k]) > 1e-8):
                names.add(free_states[j].value)
    return sorted(names)
