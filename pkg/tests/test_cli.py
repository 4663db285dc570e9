"""Command-line interface tests via click's runner."""

import numpy as np
import pytest
from click.testing import CliRunner

from riot_energy_lab import expand_scenario, integrate
from riot_energy_lab.cli import main
from riot_energy_lab.scenarios import builtin_ap_profile


@pytest.fixture()
def runner():
    return CliRunner()


def get_field(output, name):
    for line in output.splitlines():
        if line.startswith(name + ":"):
            return line.split(":", 1)[1].strip()
    raise AssertionError(f"field {name} not in output:\n{output}")


class TestSimulateNode:
    def test_builtin_5h_energy(self, runner):
        result = runner.invoke(main, ["simulate-node", "--scenario", "builtin:5h",
                                      "--horizon", "24h"])
        assert result.exit_code == 0, result.output
        energy = float(get_field(result.output, "energy_j"))
        assert energy == pytest.approx(3.0, rel=0.05)

    def test_trace_emission(self, runner, tmp_path):
        out = tmp_path / "trace.csv"
        result = runner.invoke(main, [
            "simulate-node", "--scenario", "builtin:5m", "--horizon", "120s",
            "--emit-trace", str(out), "--rate", "100",
        ])
        assert result.exit_code == 0, result.output
        assert out.exists() and out.with_suffix(".csv.meta.json").exists()

    def test_unknown_builtin_is_validation_error(self, runner):
        result = runner.invoke(main, ["simulate-node", "--scenario", "builtin:7m"])
        assert result.exit_code == 2

    def test_missing_file_is_io_or_validation(self, runner):
        result = runner.invoke(main, ["simulate-node", "--scenario", "no-such.yaml"])
        assert result.exit_code in (2, 3)


class TestSimulateAp:
    def test_matches_library(self, runner):
        result = runner.invoke(main, ["simulate-ap", "--profile", "ap-validation"])
        assert result.exit_code == 0, result.output
        lib = integrate(expand_scenario(builtin_ap_profile()), supply_voltage_v=5.0)
        assert float(get_field(result.output, "energy_j")) == pytest.approx(
            lib.energy_j, rel=1e-6
        )
        assert float(get_field(result.output, "avg_current_ma")) == pytest.approx(
            lib.avg_current_ma, rel=1e-6
        )


class TestCalibrate:
    def test_builtin_totals(self, runner, tmp_path):
        out = tmp_path / "calib.txt"
        result = runner.invoke(main, ["calibrate", "--totals", "builtin", "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert out.exists()
        assert "max |relative error|" in result.output

    def test_totals_csv(self, runner, tmp_path):
        totals = tmp_path / "totals.csv"
        totals.write_text(
            "scenario_id,period_s,energy_j\n"
            + "\n".join(f"{s},{p},{e}" for s, p, e in [
                (1, 60, 1611), (1, 3600, 1585), (2, 60, 500), (2, 3600, 467),
                (3, 60, 486), (3, 3600, 467), (4, 60, 158), (4, 3600, 59),
                (5, 60, 78), (5, 3600, 3),
            ])
        )
        out = tmp_path / "calib.txt"
        result = runner.invoke(main, ["calibrate", "--totals", str(totals), "--out", str(out)])
        assert result.exit_code == 0, result.output


class TestDatasetAndTraining:
    def test_gen_train_evaluate_pipeline(self, runner, tmp_path):
        data = tmp_path / "d.csv"
        result = runner.invoke(main, ["gen-dataset", "--rows", "200", "--seed", "5",
                                      "--out", str(data)])
        assert result.exit_code == 0, result.output

        model = tmp_path / "m.json"
        result = runner.invoke(main, ["train", "--model", "linear", "--data", str(data),
                                      "--out", str(model)])
        assert result.exit_code == 0, result.output
        r2_train = float(get_field(result.output, "r2"))

        result = runner.invoke(main, ["evaluate", "--model", str(model), "--data", str(data)])
        assert result.exit_code == 0, result.output
        assert float(get_field(result.output, "r2")) == pytest.approx(r2_train, abs=0.3)

    def test_ridge_two_point_closed_form(self, runner, tmp_path):
        data = tmp_path / "two.csv"
        data.write_text(
            "# riot-energy-lab v1\n"
            "state_duration_s,vlc_payload_bytes,ble_payload_bytes,current_uA\n"
            "0,0,0,-1\n2,0,0,1\n"
        )
        model_path = tmp_path / "m.json"
        result = runner.invoke(main, [
            "train", "--model", "ridge", "--data", str(data),
            "--test-fraction", "0", "--out", str(model_path),
        ])
        assert result.exit_code == 0, result.output
        from riot_energy_lab import ml as mlmod

        model = mlmod.load_model(model_path)
        assert model.params.weights[0] == pytest.approx(2 / 3, rel=1e-12)
        assert model.params.intercept == pytest.approx(0.0, abs=1e-12)

    def test_validation_exit_code(self, runner, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("# riot-energy-lab v1\nstate_duration_s,vlc_payload_bytes,ble_payload_bytes,current_uA\n1,2\n")
        result = runner.invoke(main, ["train", "--model", "linear", "--data", str(bad)])
        assert result.exit_code == 2


class TestHostGuestCommands:
    def test_replay_round_trip(self, runner, tmp_path):
        from riot_energy_lab.traces import CurrentTrace, read_trace, write_trace

        trace_path = tmp_path / "source.csv"
        write_trace(CurrentTrace("cli-dev", 0, 1000.0, np.arange(500.0)), trace_path)

        from riot_energy_lab.collector import CollectionHost

        host = CollectionHost(("127.0.0.1", 0), tmp_path / "out")
        host.start()
        addr = f"127.0.0.1:{host.address[1]}"
        result = runner.invoke(main, ["guest", "--connect", addr, "--replay", str(trace_path)])
        assert result.exit_code == 0, result.output
        host.wait_for_sessions(1, timeout_s=10)
        host.stop()
        stored = read_trace(tmp_path / "out" / "cli-dev.csv")
        np.testing.assert_allclose(stored.samples_ua, np.arange(500.0), rtol=1e-6)

    def test_guest_unreachable_host(self, runner, tmp_path):
        from riot_energy_lab.traces import CurrentTrace, write_trace

        trace_path = tmp_path / "t.csv"
        write_trace(CurrentTrace("d", 0, 10.0, np.zeros(5)), trace_path)
        result = runner.invoke(main, ["guest", "--connect", "127.0.0.1:1",
                                      "--replay", str(trace_path)])
        assert result.exit_code == 3
