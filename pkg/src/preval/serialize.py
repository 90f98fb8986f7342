"""JSON persistence for fitted models.

One schema covers all model kinds, discriminated by `model_kind`. Numbers
are written as decimal doubles via the standard json encoder, whose
shortest-roundtrip float formatting reproduces the exact binary values on
load, so reloaded models predict identically.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .baselines import LrModel
from .classifier import PrevalModel
from .errors import DataError

SCHEMA_VERSION = 1

RIDGE_KINDS = ("preval", "ridge_raw", "ridge_naive")


def model_to_dict(model: PrevalModel | LrModel) -> dict:
    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "model_kind": model.kind,
        "classes": [_plain(c) for c in model.classes],
        "feature_center": model.feature_center.tolist(),
        "feature_scale": None if model.feature_scale is None else model.feature_scale.tolist(),
        "beta": model.beta.tolist(),
    }
    if isinstance(model, PrevalModel):
        doc["lambda_star"] = model.lambda_star
        doc["c_star"] = model.c_star
        if model.loocv_V is not None:
            doc["loocv"] = {
                "V": model.loocv_V.tolist(),
                "A_star": model.loocv_A_star.tolist(),
                "R_over": model.loocv_R_over.tolist(),
                "residuals": model.loocv_residuals.tolist(),
            }
    else:
        doc["lambda_star"] = model.lam
        doc["intercepts"] = model.intercepts.tolist()
    return doc


def model_from_dict(doc: dict) -> PrevalModel | LrModel:
    try:
        version = doc["schema_version"]
        kind = doc["model_kind"]
    except (KeyError, TypeError) as exc:
        raise DataError(f"not a model document: missing {exc}") from None
    if version != SCHEMA_VERSION:
        raise DataError(f"unsupported model schema version: {version}")
    classes = np.asarray(doc["classes"])
    center = np.asarray(doc["feature_center"], dtype=np.float64)
    scale = doc.get("feature_scale")
    scale = None if scale is None else np.asarray(scale, dtype=np.float64)
    beta = np.asarray(doc["beta"], dtype=np.float64)
    if kind in RIDGE_KINDS:
        caches: dict = {}
        if "loocv" in doc:
            lc = doc["loocv"]
            caches = dict(
                loocv_V=np.asarray(lc["V"], dtype=np.float64),
                loocv_A_star=np.asarray(lc["A_star"], dtype=np.float64),
                loocv_R_over=np.asarray(lc["R_over"], dtype=np.float64),
                loocv_residuals=np.asarray(lc["residuals"], dtype=np.float64),
            )
        return PrevalModel(
            beta=beta,
            c_star=float(doc["c_star"]),
            lambda_star=float(doc["lambda_star"]),
            feature_center=center,
            feature_scale=scale,
            classes=classes,
            kind=kind,
            **caches,
        )
    if kind == "lr":
        return LrModel(
            beta=beta,
            intercepts=np.asarray(doc["intercepts"], dtype=np.float64),
            lam=float(doc["lambda_star"]),
            classes=classes,
            feature_center=center,
            feature_scale=scale,
        )
    raise DataError(f"unknown model kind: {kind!r}")


def save_model(model: PrevalModel | LrModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)), encoding="utf-8")


def load_model(path: str | Path) -> PrevalModel | LrModel:
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such model file: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataError(f"model file is not valid JSON: {path} ({exc})") from None
    return model_from_dict(doc)


def _plain(value):
    """Convert numpy scalars to plain Python for JSON."""
    if isinstance(value, np.generic):
        return value.item()
    return value
