"""Versioned structured-text (JSON) model persistence; round-trip exact.

JSON floats are written with Python's shortest round-trip repr, so every
float64 parameter is recovered bit-exactly on load.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ..errors import ValidationError
from .linear import LinearParams
from .mlp import MlpParams
from .models import KIND_NAMES, Mlp, ModelKind, TrainedModel
from .preprocess import Standardization
from .trees import BoostingParams, ForestParams, RegressionTree, TreeNode

MODEL_FORMAT = "riot-energy-lab-model"
MODEL_FORMAT_VERSION = 1


def _kind_to_dict(kind: ModelKind) -> dict:
    d = {"name": kind.name}
    d.update(asdict(kind))
    if isinstance(kind, Mlp):
        d["hidden"] = list(kind.hidden)
    return d


def _kind_from_dict(d: dict) -> ModelKind:
    cls = KIND_NAMES[d["name"]]
    args = {k: v for k, v in d.items() if k != "name"}
    if cls is Mlp and "hidden" in args:
        args["hidden"] = tuple(args["hidden"])
    return cls(**args)


def _tree_to_list(tree: RegressionTree) -> list[list]:
    return [[n.feature, n.threshold, n.left, n.right, n.value] for n in tree.nodes]


def _tree_from_list(rows: list[list]) -> RegressionTree:
    return RegressionTree([TreeNode(int(f), float(t), int(l), int(r), float(v))
                           for f, t, l, r, v in rows])


def _params_to_dict(model: TrainedModel) -> dict:
    p = model.params
    if isinstance(p, LinearParams):
        return {"type": "linear", "weights": p.weights.tolist(), "intercept": p.intercept}
    if isinstance(p, ForestParams):
        return {"type": "forest", "trees": [_tree_to_list(t) for t in p.trees]}
    if isinstance(p, BoostingParams):
        return {
            "type": "boosting",
            "init_value": p.init_value,
            "learning_rate": p.learning_rate,
            "trees": [_tree_to_list(t) for t in p.trees],
        }
    if isinstance(p, MlpParams):
        return {
            "type": "mlp",
            "layer_sizes": p.layer_sizes,
            "theta": p.theta.tolist(),
            "y_mean": p.y_mean,
            "y_std": p.y_std,
            "n_iterations": p.n_iterations,
            "converged": p.converged,
        }
    raise ValidationError(f"cannot serialize params of type {type(p).__name__}")


def _params_from_dict(d: dict):
    t = d["type"]
    if t == "linear":
        return LinearParams(np.asarray(d["weights"], dtype=float), float(d["intercept"]))
    if t == "forest":
        return ForestParams([_tree_from_list(rows) for rows in d["trees"]])
    if t == "boosting":
        return BoostingParams(
            float(d["init_value"]),
            float(d["learning_rate"]),
            [_tree_from_list(rows) for rows in d["trees"]],
        )
    if t == "mlp":
        return MlpParams(
            [int(x) for x in d["layer_sizes"]],
            np.asarray(d["theta"], dtype=float),
            float(d["y_mean"]),
            float(d["y_std"]),
            int(d.get("n_iterations", 0)),
            bool(d.get("converged", False)),
        )
    raise ValidationError(f"unknown params type {t!r}")


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "format": MODEL_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "kind": _kind_to_dict(model.kind),
        "seed": model.seed,
        "standardization": {
            "mean": model.standardization.mean.tolist(),
            "std": model.standardization.std.tolist(),
            "constant_features": list(model.standardization.constant_features),
        },
        "params": _params_to_dict(model),
    }


def model_from_dict(d: dict) -> TrainedModel:
    if d.get("format") != MODEL_FORMAT:
        raise ValidationError("not a riot-energy-lab model file")
    if d.get("version") != MODEL_FORMAT_VERSION:
        raise ValidationError(f"unsupported model format version {d.get('version')}")
    st = d["standardization"]
    return TrainedModel(
        kind=_kind_from_dict(d["kind"]),
        standardization=Standardization(
            np.asarray(st["mean"], dtype=float),
            np.asarray(st["std"], dtype=float),
            tuple(int(i) for i in st.get("constant_features", [])),
        ),
        params=_params_from_dict(d["params"]),
        seed=int(d.get("seed", 0)),
    )


def save_model(model: TrainedModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)))


def load_model(path: str | Path) -> TrainedModel:
    return model_from_dict(json.loads(Path(path).read_text()))
