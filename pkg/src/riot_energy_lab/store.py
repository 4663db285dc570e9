"""Content-addressed directory store for datasets and trained models.

Artifact ids are truncated SHA-256 digests of the canonical JSON request
that produced them, so repeating a generation/training request yields the
same id and the cached artifact (all producers are seeded and deterministic).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .datasets import DatasetRow, read_dataset, write_dataset
from .errors import NotFoundError
from .ml import TrainedModel, load_model, save_model

ID_HEX_LEN = 16


def content_id(request: dict) -> str:
    canonical = json.dumps(request, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:ID_HEX_LEN]


class ArtifactStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        (self.root / "datasets").mkdir(parents=True, exist_ok=True)
        (self.root / "models").mkdir(parents=True, exist_ok=True)

    # --- datasets -----------------------------------------------------------

    def dataset_path(self, dataset_id: str) -> Path:
        return self.root / "datasets" / f"{dataset_id}.csv"

    def has_dataset(self, dataset_id: str) -> bool:
        return self.dataset_path(dataset_id).exists()

    def put_dataset(self, request: dict, rows: list[DatasetRow]) -> str:
        dataset_id = content_id(request)
        path = self.dataset_path(dataset_id)
        if not path.exists():
            write_dataset(rows, path)
            path.with_suffix(".request.json").write_text(json.dumps(request, indent=2))
        return dataset_id

    def get_dataset(self, dataset_id: str) -> list[DatasetRow]:
        path = self.dataset_path(dataset_id)
        if not path.exists():
            raise NotFoundError(f"no dataset {dataset_id!r} in store")
        return read_dataset(path)

    # --- models -------------------------------------------------------------

    def model_path(self, model_id: str) -> Path:
        return self.root / "models" / f"{model_id}.json"

    def has_model(self, model_id: str) -> bool:
        return self.model_path(model_id).exists()

    def put_model(self, request: dict, model: TrainedModel, metrics: dict) -> str:
        model_id = content_id(request)
        path = self.model_path(model_id)
        if not path.exists():
            save_model(model, path)
            path.with_suffix(".request.json").write_text(
                json.dumps({"request": request, "metrics": metrics}, indent=2)
            )
        return model_id

    def get_model(self, model_id: str) -> TrainedModel:
        path = self.model_path(model_id)
        if not path.exists():
            raise NotFoundError(f"no model {model_id!r} in store")
        return load_model(path)

    def model_metrics(self, model_id: str) -> dict:
        path = self.model_path(model_id).with_suffix(".request.json")
        if not path.exists():
            raise NotFoundError(f"no model {model_id!r} in store")
        return json.loads(path.read_text()).get("metrics", {})
