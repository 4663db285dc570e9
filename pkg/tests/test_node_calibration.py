"""Node power table and NNLS calibration tests."""

import pytest

from riot_energy_lab.calibrate import fit_calibration
from riot_energy_lab.errors import CalibrationIncompleteError, ValidationError
from riot_energy_lab.node import (
    REFERENCE_TOTALS_24H_J,
    NodePowerCalibration,
    NodeState,
    ScenarioRecipe,
    node_state_power,
    read_calibration,
    write_calibration,
)


class TestPowerTable:
    def test_missing_state_raises_with_name(self):
        empty = NodePowerCalibration({})
        with pytest.raises(CalibrationIncompleteError, match="idle"):
            node_state_power(NodeState.IDLE, empty)

    def test_deep_sleep_within_lowest_scenario_budget(self, calibration):
        # the lowest 24 h total is 3 J, so sleep power must stay under it
        p = node_state_power(NodeState.DEEP_SLEEP, calibration)
        assert p / 1e3 * 86400 <= 3.0

    def test_vlc_listening_idle_exceeds_plain_idle(self, calibration):
        assert node_state_power(
            NodeState.IDLE_VLC_LISTENING, calibration
        ) > node_state_power(NodeState.IDLE, calibration)

    def test_ordering_invariant_enforced(self):
        with pytest.raises(ValidationError, match="ordering"):
            NodePowerCalibration(
                {
                    NodeState.DEEP_SLEEP: 2.0,
                    NodeState.IDLE: 1.0,
                    NodeState.IDLE_VLC_LISTENING: 3.0,
                }
            )

    def test_negative_power_rejected(self):
        with pytest.raises(ValidationError, match="negative"):
            NodePowerCalibration({NodeState.IDLE: -1.0})

    def test_every_state_has_a_shipped_entry(self, calibration):
        for state in NodeState:
            assert state in calibration.powers_mw
            assert calibration.provenance[state] in ("fit", "prior")


def single_state_recipe(state, duration_s):
    return ScenarioRecipe(
        scenario_id=9,
        description="synthetic",
        preamble=(),
        cycle=((state, duration_s),),
        period_mode="active_plus_sleep",
        rest_state=state,
    )


class TestFitCalibration:
    def test_exactly_determined_single_state(self):
        # one state filling 86400 s with an 86.4 J target -> exactly 1 mW
        catalog = {9: single_state_recipe(NodeState.SENSING, 1.0)}
        report = fit_calibration([(9, 1.0, 86.4)], catalog=catalog, pinned_mw={})
        assert report.calibration.powers_mw[NodeState.SENSING] == pytest.approx(1.0, rel=1e-9)
        assert report.max_abs_relative_error < 1e-9

    def test_reference_totals_within_tolerance(self):
        report = fit_calibration(list(REFERENCE_TOTALS_24H_J))
        assert report.within_tolerance(0.05)
        assert len(report.residuals) == 10

    def test_row_order_invariance(self):
        totals = list(REFERENCE_TOTALS_24H_J)
        a = fit_calibration(totals).calibration
        b = fit_calibration(list(reversed(totals))).calibration
        for state in a.powers_mw:
            assert a.powers_mw[state] == pytest.approx(b.powers_mw.get(state), rel=1e-9)

    def test_scaling_durations_and_energies_leaves_powers_unchanged(self):
        k = 3.0
        cat1 = {9: single_state_recipe(NodeState.SENSING, 2.0)}
        catk = {9: single_state_recipe(NodeState.SENSING, 2.0 * k)}
        a = fit_calibration([(9, 2.0, 50.0)], catalog=cat1, pinned_mw={})
        b = fit_calibration(
            [(9, 2.0 * k, 50.0 * k)], catalog=catk, pinned_mw={}, horizon_s=86400.0 * k
        )
        assert a.calibration.powers_mw[NodeState.SENSING] == pytest.approx(
            b.calibration.powers_mw[NodeState.SENSING], rel=1e-9
        )

    def test_infeasible_totals_flagged_by_residual(self):
        # a superset of activity consuming less energy cannot be fitted
        # nonnegatively; the report shows the failure instead of hiding it
        recipe_small = single_state_recipe(NodeState.SENSING, 1.0)
        recipe_big = ScenarioRecipe(
            8, "synthetic superset", (), ((NodeState.SENSING, 1.0), (NodeState.EINK_UPDATE, 1.0)),
            "active_plus_sleep", NodeState.SENSING,
        )
        catalog = {9: recipe_small, 8: recipe_big}
        report = fit_calibration(
            [(9, 1.0, 100.0), (8, 2.0, 50.0)], catalog=catalog, pinned_mw={}
        )
        assert not report.within_tolerance(0.05)

    def test_rank_deficiency_names_indistinguishable_states(self):
        # two states that only ever appear together in fixed proportion
        recipe = ScenarioRecipe(
            9, "synthetic collinear", (),
            ((NodeState.SENSING, 1.0), (NodeState.EINK_UPDATE, 1.0)),
            "active_plus_sleep", NodeState.SENSING,
        )
        from riot_energy_lab.errors import DataError

        with pytest.raises(DataError, match="sensing") as excinfo:
            fit_calibration([(9, 1.0, 10.0), (9, 1.0, 10.0)], catalog={9: recipe}, pinned_mw={})
        assert "eink_update" in str(excinfo.value)

    def test_validates_inputs(self):
        with pytest.raises(ValidationError):
            fit_calibration([])
        with pytest.raises(ValidationError, match="positive"):
            fit_calibration([(1, 60.0, -5.0)])
        with pytest.raises(ValidationError, match="not in catalog"):
            fit_calibration([(42, 60.0, 10.0)])


class TestCalibrationFile:
    def test_round_trip(self, tmp_path, calibration):
        path = tmp_path / "calib.txt"
        write_calibration(calibration, path)
        loaded = read_calibration(path)
        assert set(loaded.powers_mw) == set(calibration.powers_mw)
        for state in calibration.powers_mw:
            assert loaded.powers_mw[state] == pytest.approx(
                calibration.powers_mw[state], abs=1e-6
            )
            assert loaded.provenance[state] == calibration.provenance[state]

    def test_rejects_missing_provenance_column(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("idle = 1.0\n")
        with pytest.raises(ValidationError, match="bad calibration line"):
            read_calibration(path)

    def test_shipped_file_matches_regenerated_fit(self, calibration):
        report = fit_calibration(list(REFERENCE_TOTALS_24H_J))
        for state, power in report.calibration.powers_mw.items():
            assert calibration.powers_mw[state] == pytest.approx(power, abs=1e-5)
