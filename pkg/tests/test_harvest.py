"""Supercapacitor harvesting simulation tests."""

import math

import numpy as np
import pytest

from riot_energy_lab.errors import ValidationError
from riot_energy_lab.harvest import HarvestConfig, simulate_harvest
from riot_energy_lab.scenarios import POWER_MILLIWATTS, Timeline, TimelineEntry


def load_timeline(power_mw: float, duration_s: float) -> Timeline:
    return Timeline(POWER_MILLIWATTS, [TimelineEntry(0.0, duration_s, power_mw, "load")], duration_s)


class TestSupercapDynamics:
    def test_equilibrium_keeps_voltage_constant(self):
        cfg = HarvestConfig(input_power_mw=10.0, capacitance_f=1.0, v_init=2.0,
                            v_max=2.7, v_cutoff=1.0)
        res = simulate_harvest(load_timeline(10.0, 50.0), cfg)
        assert np.allclose(res.voltages, 2.0)
        assert res.depletion_events == []

    def test_discharge_matches_closed_form(self):
        # no harvest, 10 mW for 1 s from 2 V on 1 F: V = sqrt(V0^2 - 2 E / C)
        cfg = HarvestConfig(input_power_mw=0.0, capacitance_f=1.0, v_init=2.0,
                            v_max=2.7, v_cutoff=0.5)
        res = simulate_harvest(load_timeline(10.0, 1.0), cfg)
        expected = math.sqrt(4.0 - 2 * 0.010 * 1.0 / 1.0)
        assert res.v_end == pytest.approx(expected, rel=1e-3)

    def test_energy_conservation_without_clipping(self):
        cfg = HarvestConfig(input_power_mw=5.0, capacitance_f=0.5, v_init=2.2,
                            v_max=3.0, v_cutoff=0.8)
        duration = 30.0
        load = 12.0
        res = simulate_harvest(load_timeline(load, duration), cfg)
        net_j = (5.0 - load) / 1e3 * duration
        stored_j = 0.5 * cfg.capacitance_f * (res.v_end**2 - cfg.v_init**2)
        assert stored_j == pytest.approx(net_j, rel=5e-3)

    def test_depletion_event_and_halt(self):
        # heavy load drains to the cutoff; the node halts and the voltage
        # holds at the floor because the halt draw exceeds the harvest
        cfg = HarvestConfig(input_power_mw=0.0, capacitance_f=0.1, v_init=2.0,
                            v_max=2.7, v_cutoff=1.9, halt_load_mw=0.02)
        res = simulate_harvest(load_timeline(100.0, 60.0), cfg)
        assert len(res.depletion_events) == 1
        assert res.v_end == pytest.approx(cfg.v_cutoff)

    def test_recovery_after_depletion(self):
        # strong harvest lifts the node out of the halt; it then drains again,
        # producing repeated depletion events
        cfg = HarvestConfig(input_power_mw=50.0, capacitance_f=0.05, v_init=1.95,
                            v_max=2.7, v_cutoff=1.9, halt_load_mw=0.0)
        res = simulate_harvest(load_timeline(500.0, 20.0), cfg)
        assert len(res.depletion_events) >= 2

    def test_ceiling_clamp(self):
        cfg = HarvestConfig(input_power_mw=100.0, capacitance_f=0.1, v_init=2.6,
                            v_max=2.7, v_cutoff=1.0)
        res = simulate_harvest(load_timeline(0.001, 30.0), cfg)
        assert res.v_end == pytest.approx(2.7)

    def test_piecewise_harvest_profile(self):
        cfg = HarvestConfig(
            input_power_mw=((0.0, 0.0), (5.0, 20.0)),
            capacitance_f=1.0, v_init=2.0, v_max=2.7, v_cutoff=1.0,
        )
        res = simulate_harvest(load_timeline(5.0, 10.0), cfg)
        # 5 s of net -5 mW then 5 s of net +15 mW: ends above the start
        assert res.v_end > 2.0


class TestHarvestValidation:
    def test_zero_capacitance_rejected(self):
        with pytest.raises(ValidationError, match="capacitance"):
            HarvestConfig(capacitance_f=0.0)

    def test_voltage_ordering_enforced(self):
        with pytest.raises(ValidationError):
            HarvestConfig(v_init=2.0, v_max=1.5, v_cutoff=1.0)
        with pytest.raises(ValidationError):
            HarvestConfig(v_init=1.0, v_max=2.7, v_cutoff=1.5)

    def test_zero_cutoff_guard_on_full_drain(self):
        cfg = HarvestConfig(input_power_mw=0.0, capacitance_f=0.001, v_init=1.0,
                            v_max=2.7, v_cutoff=0.0)
        with pytest.raises(ValidationError, match="diverges"):
            simulate_harvest(load_timeline(1000.0, 10.0), cfg)

    def test_requires_power_timeline(self):
        from riot_energy_lab.scenarios import CURRENT_MILLIAMPS

        tl = Timeline(CURRENT_MILLIAMPS, [TimelineEntry(0.0, 1.0, 1.0, "x")], 1.0)
        with pytest.raises(ValidationError, match="power-based"):
            simulate_harvest(tl, HarvestConfig())

    def test_unknown_source_rejected(self):
        with pytest.raises(ValidationError, match="source"):
            HarvestConfig(source="wind")
