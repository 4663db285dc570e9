"""HTTP API tests (FastAPI test client; no network)."""

import pytest
from fastapi.testclient import TestClient

from riot_energy_lab import integrate, expand_scenario, make_builtin, shipped_calibration
from riot_energy_lab.scenarios import builtin_ap_profile
from riot_energy_lab.server import create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(store_dir=tmp_path / "store")
    with TestClient(app) as c:
        yield c


class TestBasics:
    def test_health(self, client):
        body = client.get("/api/v1/health").json()
        assert body["status"] == "ok"
        assert "version" in body

    def test_scenarios_listing(self, client):
        body = client.get("/api/v1/scenarios").json()
        names = [s["name"] for s in body["scenarios"]]
        assert len(names) == 10
        assert "builtin:5h" in names
        assert body["ap_profiles"][0]["name"] == "ap-validation"

    def test_error_shape(self, client):
        resp = client.post("/api/v1/simulate/node", json={"scenario": 42})
        assert resp.status_code == 400
        body = resp.json()
        assert body["code"] == "validation"
        assert "message" in body

    def test_not_found_mapped(self, client):
        resp = client.get("/api/v1/datasets/ffffffffffffffff")
        assert resp.status_code == 404
        assert resp.json()["code"] == "not_found"


class TestSimulation:
    def test_node_builtin_energy(self, client):
        body = client.post(
            "/api/v1/simulate/node", json={"scenario": "builtin:1m"}
        ).json()
        assert body["energy_j"] == pytest.approx(1611.0, rel=0.05)

    def test_matches_library_exactly(self, client):
        body = client.post("/api/v1/simulate/node", json={"scenario": "builtin:5h"}).json()
        lib = integrate(
            expand_scenario(make_builtin(5, "1h"), calibration=shipped_calibration())
        )
        assert body["energy_j"] == lib.energy_j

    def test_ap_profile_totals(self, client):
        body = client.post("/api/v1/simulate/ap", json={"profile": "ap-validation"}).json()
        lib = integrate(expand_scenario(builtin_ap_profile()), supply_voltage_v=5.0)
        assert body["energy_j"] == lib.energy_j
        assert body["avg_current_ma"] == lib.avg_current_ma
        assert body["trace_preview"]["n_entries"] == 15

    def test_custom_scenario_with_harvest(self, client):
        scenario = {
            "name": "tiny",
            "horizon_s": 10.0,
            "repeat": {"mode": "once"},
            "cycle": [{"state": "idle", "duration_s": 10.0}],
        }
        body = client.post(
            "/api/v1/simulate/node",
            json={
                "scenario": scenario,
                "harvest": {"capacitance_f": 1.0, "v_init": 2.5, "v_max": 2.7,
                            "v_cutoff": 1.0, "input_power_mw": 0.0},
            },
        ).json()
        assert body["harvest"]["voltages"][0] == 2.5
        assert body["harvest"]["depletion_events"] == []

    def test_validation_errors_from_scenario(self, client):
        scenario = {
            "name": "broken",
            "horizon_s": 10.0,
            "repeat": {"mode": "once"},
            "cycle": [{"state": "idle", "duration_s": 0.0}],
        }
        resp = client.post("/api/v1/simulate/node", json={"scenario": scenario})
        assert resp.status_code == 400


class TestDatasetAndModels:
    def test_dataset_idempotent_creation(self, client):
        req = {"n_rows": 50, "seed": 1}
        a = client.post("/api/v1/datasets", json=req).json()
        b = client.post("/api/v1/datasets", json=req).json()
        assert a["dataset_id"] == b["dataset_id"]
        csv_text = client.get(f"/api/v1/datasets/{a['dataset_id']}").text
        assert csv_text.startswith("# riot-energy-lab v1")
        assert len(csv_text.strip().splitlines()) == 52  # tag + header + rows

    def test_train_model_and_predict(self, client):
        ds = client.post("/api/v1/datasets", json={"n_rows": 120, "seed": 2}).json()
        trained = client.post(
            "/api/v1/models",
            json={"kind": "linear", "dataset_id": ds["dataset_id"], "seed": 0},
        ).json()
        assert "metrics" in trained and "r2" in trained["metrics"]
        again = client.post(
            "/api/v1/models",
            json={"kind": "linear", "dataset_id": ds["dataset_id"], "seed": 0},
        ).json()
        assert again["model_id"] == trained["model_id"]

        pred = client.post(
            f"/api/v1/models/{trained['model_id']}/predict",
            json={"features": [1.0, 16, 40]},
        ).json()
        assert isinstance(pred["current_ua"], float)

    def test_background_training_job(self, client):
        ds = client.post("/api/v1/datasets", json={"n_rows": 60, "seed": 3}).json()
        job = client.post(
            "/api/v1/models",
            json={"kind": "ridge", "dataset_id": ds["dataset_id"], "background": True},
        ).json()
        import time

        for _ in range(100):
            state = client.get(f"/api/v1/jobs/{job['job_id']}").json()
            if state["status"] != "running":
                break
            time.sleep(0.05)
        assert state["status"] == "done"
        assert "model_id" in state["result"]

    def test_missing_dataset_id_rejected(self, client):
        resp = client.post("/api/v1/models", json={"kind": "linear"})
        assert resp.status_code == 400

    def test_collect_sessions_empty(self, client):
        assert client.get("/api/v1/collect/sessions").json() == {"sessions": []}
