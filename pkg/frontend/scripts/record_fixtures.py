#!/usr/bin/env python3
"""Re-record the API fixtures used by the frontend contract tests.

Run from the repository root with the riot_energy_lab package installed:

    python frontend/scripts/record_fixtures.py

Fixtures capture exact server responses; the contract tests assert the UI
displays those values byte-for-byte. Re-record only when the API changes.
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from riot_energy_lab.server import create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as store:
        client = TestClient(create_app(store_dir=store))

        def record(name, method, url, payload=None):
            resp = client.post(url, json=payload) if method == "post" else client.get(url)
            content_type = resp.headers.get("content-type", "")
            body = resp.json() if content_type.startswith("application/json") else resp.text
            (OUT / f"{name}.json").write_text(
                json.dumps(
                    {
                        "request": {"method": method, "url": url, "payload": payload},
                        "status": resp.status_code,
                        "body": body,
                    },
                    indent=2,
                )
            )
            print(f"{name}: {resp.status_code}")
            return body

        record("health", "get", "/api/v1/health")
        record("scenarios", "get", "/api/v1/scenarios")
        record("simulate_node_5h", "post", "/api/v1/simulate/node", {"scenario": "builtin:5h"})
        record("simulate_node_4m", "post", "/api/v1/simulate/node", {"scenario": "builtin:4m"})
        record("simulate_node_4h", "post", "/api/v1/simulate/node", {"scenario": "builtin:4h"})
        record(
            "simulate_node_harvest",
            "post",
            "/api/v1/simulate/node",
            {
                "scenario": {
                    "name": "harvest-demo",
                    "horizon_s": 120.0,
                    "repeat": {"mode": "once"},
                    "cycle": [{"state": "idle_vlc_listening", "duration_s": 120.0}],
                },
                "harvest": {
                    "capacitance_f": 0.05,
                    "v_init": 1.95,
                    "v_max": 2.7,
                    "v_cutoff": 1.9,
                    "input_power_mw": 0.0,
                },
            },
        )
        record("simulate_ap_validation", "post", "/api/v1/simulate/ap", {"profile": "ap-validation"})
        for duty in (0, 20, 50, 98):
            ap = (
                {"vlc": {"mode": "idle", "duty_pct": duty}, "usb": True, "eth": True}
                if duty
                else {"usb": True, "eth": True}
            )
            record(
                f"ap_slider_{duty}",
                "post",
                "/api/v1/simulate/ap",
                {
                    "profile": {
                        "name": f"slider-{duty}",
                        "horizon_s": 1.0,
                        "repeat": {"mode": "once"},
                        "cycle": [{"duration_s": 1.0, "ap": ap}],
                    }
                },
            )
        ds = record("dataset_create", "post", "/api/v1/datasets", {"n_rows": 400, "seed": 7})
        for kind in ("linear", "mlp"):
            record(
                f"train_{kind}",
                "post",
                "/api/v1/models",
                {"kind": kind, "dataset_id": ds["dataset_id"], "seed": 3},
            )
        trained = json.loads((OUT / "train_linear.json").read_text())["body"]
        record(
            "predict_linear",
            "post",
            f"/api/v1/models/{trained['model_id']}/predict",
            {"features": [1.0, 16, 40]},
        )

        corpus = []

        def probe(url, payload):
            resp = client.post(url, json=payload)
            corpus.append({"url": url, "payload": payload, "status": resp.status_code})

        once = {"mode": "once"}
        probe("/api/v1/simulate/node", {"scenario": {"name": "ok", "horizon_s": 10.0,
              "repeat": once, "cycle": [{"state": "idle", "duration_s": 10.0}]}})
        probe("/api/v1/simulate/node", {"scenario": {"name": "zero-dur", "horizon_s": 10.0,
              "repeat": once, "cycle": [{"state": "idle", "duration_s": 0.0}]}})
        probe("/api/v1/simulate/node", {"scenario": {"name": "neg-dur", "horizon_s": 10.0,
              "repeat": once, "cycle": [{"state": "idle", "duration_s": -2.0}]}})
        probe("/api/v1/simulate/node", {"scenario": {"name": "bad-state", "horizon_s": 10.0,
              "repeat": once, "cycle": [{"state": "warp_drive", "duration_s": 1.0}]}})
        probe("/api/v1/simulate/node", {"scenario": {"name": "bad-horizon", "horizon_s": -5.0,
              "repeat": once, "cycle": [{"state": "idle", "duration_s": 1.0}]}})
        probe("/api/v1/simulate/node", {"scenario": {"name": "cycle-gt-period", "horizon_s": 100.0,
              "repeat": {"mode": "periodic", "period_s": 5.0},
              "cycle": [{"state": "idle", "duration_s": 10.0}]}})
        probe("/api/v1/simulate/ap", {"profile": {"name": "duty-hi", "horizon_s": 1.0,
              "repeat": once,
              "cycle": [{"duration_s": 1.0, "ap": {"vlc": {"mode": "idle", "duty_pct": 99}}}]}})
        probe("/api/v1/simulate/ap", {"profile": {"name": "duty-ok", "horizon_s": 1.0,
              "repeat": once,
              "cycle": [{"duration_s": 1.0, "ap": {"vlc": {"mode": "idle", "duty_pct": 98}}}]}})
        probe("/api/v1/simulate/ap", {"profile": {"name": "scan-bad", "horizon_s": 1.0,
              "repeat": once,
              "cycle": [{"duration_s": 1.0,
                         "ap": {"ble": {"mode": "scanning", "window_ms": 150, "interval_ms": 100}}}]}})
        probe("/api/v1/simulate/ap", {"profile": {"name": "scan-ok", "horizon_s": 1.0,
              "repeat": once,
              "cycle": [{"duration_s": 1.0,
                         "ap": {"ble": {"mode": "scanning", "window_ms": 50, "interval_ms": 100}}}]}})
        probe("/api/v1/models", {"kind": "svm", "dataset_id": ds["dataset_id"]})
        probe("/api/v1/models", {"kind": "linear"})
        (OUT / "validation_corpus.json").write_text(json.dumps(corpus, indent=2))
        print("corpus statuses:", [c["status"] for c in corpus])


if __name__ == "__main__":
    main()
