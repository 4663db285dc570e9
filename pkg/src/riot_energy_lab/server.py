"""Local HTTP service exposing simulation, datasets, training, and prediction.

All endpoints are stateless except the dataset/model stores, which are keyed
by content-hash ids: repeating a POST with an identical payload returns the
same id and the cached artifact.  Long trainings can be submitted as
background jobs and polled at ``/api/v1/jobs/{id}``.
"""

from __future__ import annotations

import threading
import uuid
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles

from . import __version__, ml
from .config import Constants
from .datasets import gen_dataset
from .errors import NotFoundError, RiotLabError, ValidationError
from .harvest import HarvestConfig, simulate_harvest
from .node import node_state_from_name, shipped_calibration
from .scenarios import (
    builtin_ap_profile,
    builtin_scenarios,
    expand_scenario,
    integrate,
    parse_builtin_ref,
    scenario_from_dict,
    scenario_to_dict,
)
from .store import ArtifactStore, content_id

HTTP_PORT_ENV_VAR = "RIOT_LAB_HTTP_PORT"
DEFAULT_HTTP_PORT = 8080

TIMELINE_PREVIEW_ENTRIES = 200

_STATUS_BY_CODE = {
    "validation": 400,
    "domain": 400,
    "protocol": 400,
    "not_found": 404,
    "conflict": 409,
    "internal": 500,
}


class JobRegistry:
    def __init__(self):
        self._jobs: dict[str, dict] = {}
        self._lock = threading.Lock()

    def submit(self, fn, *args) -> str:
        job_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._jobs[job_id] = {"status": "running", "result": None, "error": None}

        def run():
            try:
                result = fn(*args)
                with self._lock:
                    self._jobs[job_id].update(status="done", result=result)
            except Exception as exc:  # noqa: BLE001
                with self._lock:
                    self._jobs[job_id].update(status="failed", error=str(exc))

        threading.Thread(target=run, daemon=True).start()
        return job_id

    def get(self, job_id: str) -> dict:
        with self._lock:
            if job_id not in self._jobs:
                raise NotFoundError(f"no job {job_id!r}")
            return dict(self._jobs[job_id])


def create_app(store_dir: str | Path = "riot-lab-store", ui_dir: str | Path | None = None) -> FastAPI:
    if ui_dir is not None:
        ui_dir = Path(ui_dir).resolve()
        if not ui_dir.is_dir():
            raise ValidationError(f"UI directory {ui_dir} does not exist; build the frontend first")
    app = FastAPI(title="riot-energy-lab", version=__version__)
    store = ArtifactStore(store_dir)
    jobs = JobRegistry()
    constants = Constants()
    calibration = shipped_calibration()

    @app.exception_handler(RiotLabError)
    async def _lab_error(_req: Request, exc: RiotLabError):
        return JSONResponse(
            status_code=_STATUS_BY_CODE.get(exc.code, 500),
            content={"code": exc.code, "message": str(exc), "detail": type(exc).__name__},
        )

    @app.get("/api/v1/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/api/v1/scenarios")
    def scenarios():
        return {
            "scenarios": [scenario_to_dict(s) for s in builtin_scenarios()],
            "ap_profiles": [scenario_to_dict(builtin_ap_profile())],
        }

    def _resolve_node_scenario(payload: dict):
        ref = payload.get("scenario")
        horizon = payload.get("horizon_s")
        if isinstance(ref, str):
            return parse_builtin_ref(ref, float(horizon) if horizon else 86400.0)
        if isinstance(ref, dict):
            return scenario_from_dict(ref, float(horizon) if horizon else None)
        raise ValidationError("scenario must be a builtin reference or a scenario object")

    @app.post("/api/v1/simulate/node")
    def simulate_node(payload: dict):
        scenario = _resolve_node_scenario(payload)
        timeline = expand_scenario(scenario, calibration=calibration)
        result = integrate(timeline, supply_voltage_v=constants.node_supply_voltage_v)
        body: dict[str, Any] = {
            "scenario": scenario.name,
            "horizon_s": scenario.horizon_s,
            "energy_j": result.energy_j,
            "charge_c": result.charge_c,
            "avg_power_mw": result.avg_power_mw,
            "timeline": _timeline_preview(timeline),
        }
        if "harvest" in payload and payload["harvest"]:
            cfg = _harvest_from_dict(payload["harvest"])
            hr = simulate_harvest(timeline, cfg)
            body["harvest"] = {
                "times_s": hr.times_s.tolist(),
                "voltages": hr.voltages.tolist(),
                "depletion_events": hr.depletion_events,
            }
        return body

    @app.post("/api/v1/simulate/ap")
    def simulate_ap(payload: dict):
        ref = payload.get("profile")
        if isinstance(ref, str):
            profile = builtin_ap_profile(ref)
        elif isinstance(ref, dict):
            profile = scenario_from_dict(ref)
        else:
            raise ValidationError("profile must be a builtin name or a profile object")
        timeline = expand_scenario(profile)
        result = integrate(timeline, supply_voltage_v=constants.ap.supply_voltage_v)
        return {
            "profile": profile.name,
            "energy_j": result.energy_j,
            "charge_c": result.charge_c,
            "avg_current_ma": result.avg_current_ma,
            "trace_preview": _timeline_preview(timeline),
        }

    @app.post("/api/v1/datasets")
    def create_dataset(payload: dict):
        n_rows = int(payload.get("n_rows", 1000))
        seed = int(payload.get("seed", 0))
        noise = float(payload.get("noise_sigma_ua", 20.0))
        baseline = str(payload.get("baseline_state", "ble_connected_idle"))
        request = {
            "op": "gen_dataset",
            "n_rows": n_rows,
            "seed": seed,
            "noise_sigma_ua": noise,
            "baseline_state": baseline,
        }
        dataset_id = content_id(request)
        if not store.has_dataset(dataset_id):
            rows = gen_dataset(
                n_rows, seed, calibration, noise,
                baseline_state=node_state_from_name(baseline),
            )
            store.put_dataset(request, rows)
        return {"dataset_id": dataset_id, "n_rows": n_rows}

    @app.get("/api/v1/datasets/{dataset_id}")
    def get_dataset(dataset_id: str):
        path = store.dataset_path(dataset_id)
        if not path.exists():
            raise NotFoundError(f"no dataset {dataset_id!r}")
        return PlainTextResponse(path.read_text(), media_type="text/csv")

    def _train(request: dict) -> dict:
        model_id = content_id(request)
        if store.has_model(model_id):
            return {"model_id": model_id, "metrics": store.model_metrics(model_id)}
        rows = store.get_dataset(request["dataset_id"])
        kind = ml.kind_from_name(request["kind"])
        train_rows, test_rows = ml.train_test_split(
            rows, request["test_fraction"], request["seed"]
        )
        model = ml.fit(kind, train_rows, request["seed"])
        metrics = ml.evaluate(model, test_rows)
        metrics_d = {"r2": metrics.r2, "mae_ua": metrics.mae_ua, "rmse_ua": metrics.rmse_ua}
        store.put_model(request, model, metrics_d)
        return {"model_id": model_id, "metrics": metrics_d}

    @app.post("/api/v1/models")
    def create_model(payload: dict):
        request = {
            "op": "train",
            "kind": str(payload.get("kind", "linear")),
            "dataset_id": str(payload["dataset_id"]) if "dataset_id" in payload else "",
            "seed": int(payload.get("seed", 0)),
            "test_fraction": float(payload.get("test_fraction", 0.2)),
        }
        if not request["dataset_id"]:
            raise ValidationError("dataset_id is required")
        ml.kind_from_name(request["kind"])  # validate early
        if payload.get("background"):
            return {"job_id": jobs.submit(_train, request)}
        return _train(request)

    @app.post("/api/v1/models/{model_id}/predict")
    def predict(model_id: str, payload: dict):
        model = store.get_model(model_id)
        features = payload.get("features")
        if features is None:
            raise ValidationError("features array is required")
        return {"current_ua": ml.predict(model, features)}

    @app.get("/api/v1/models/{model_id}")
    def get_model(model_id: str):
        if not store.has_model(model_id):
            raise NotFoundError(f"no model {model_id!r}")
        return {"model_id": model_id, "metrics": store.model_metrics(model_id)}

    @app.get("/api/v1/jobs/{job_id}")
    def get_job(job_id: str):
        return jobs.get(job_id)

    @app.get("/api/v1/collect/sessions")
    def collect_sessions():
        import json as _json

        sessions = []
        root = Path(store_dir) / "collect"
        if root.exists():
            for manifest in sorted(root.glob("*/manifest.json")):
                data = _json.loads(manifest.read_text())
                sessions.append({"session": manifest.parent.name, **data})
        return {"sessions": sessions}

    if ui_dir is not None:
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app


def _timeline_preview(timeline) -> dict:
    entries = [
        {"t_start_s": e.t_start_s, "duration_s": e.duration_s, "value": e.value, "label": e.label}
        for e in timeline.entries[:TIMELINE_PREVIEW_ENTRIES]
    ]
    return {
        "value_kind": timeline.value_kind,
        "total_duration_s": timeline.total_duration_s,
        "n_entries": len(timeline.entries),
        "entries": entries,
        "truncated": len(timeline.entries) > TIMELINE_PREVIEW_ENTRIES,
    }


def _harvest_from_dict(d: dict) -> HarvestConfig:
    profile = d.get("input_power_mw", 0.0)
    if isinstance(profile, list):
        profile = tuple((float(t), float(p)) for t, p in profile)
    return HarvestConfig(
        source=str(d.get("source", "light")),
        input_power_mw=profile,
        capacitance_f=float(d.get("capacitance_f", 1.0)),
        v_init=float(d.get("v_init", 2.5)),
        v_max=float(d.get("v_max", 2.7)),
        v_cutoff=float(d.get("v_cutoff", 1.8)),
        halt_load_mw=float(d.get("halt_load_mw", 0.02)),
    )
