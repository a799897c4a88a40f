"""Model persistence: versioned JSON documents for plain decision trees and
hybrid bundles (ckm + pm + rckm + alpha + graft log). Round-trips are
structurally exact; floats survive bit-for-bit.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import IoFailureError, SchemaViolationError, VersionMismatchError
from .hybrid import GraftEntry, HybridModel
from .knowledge import DecisionTree, parse_knowledge_model, tree_to_dict

SUPPORTED_MODEL_VERSION = "1"


def hybrid_to_dict(model: HybridModel) -> dict:
    return {
        "model_version": SUPPORTED_MODEL_VERSION,
        "kind": "hybrid",
        "alpha": model.alpha,
        "ckm": tree_to_dict(model.ckm),
        "pm": tree_to_dict(model.pm),
        "rckm": tree_to_dict(model.rckm),
        "graft_log": [g.to_dict() for g in model.graft_log],
    }


def hybrid_from_dict(doc: dict) -> HybridModel:
    for key in ("alpha", "ckm", "pm", "rckm"):
        if key not in doc:
            raise SchemaViolationError(f"hybrid bundle missing key {key!r}")
    graft_log = tuple(
        GraftEntry(
            host_node=g["host_node"],
            kind=g["kind"],
            attribute=g["attribute"],
            region=g["region"],
            pm_source=g["pm_source"],
            grafted_root=g["grafted_root"],
        )
        for g in doc.get("graft_log", ())
    )
    return HybridModel(
        ckm=parse_knowledge_model(doc["ckm"]),
        pm=parse_knowledge_model(doc["pm"]),
        rckm=parse_knowledge_model(doc["rckm"]),
        alpha=float(doc["alpha"]),
        graft_log=graft_log,
    )


def model_to_json(model: DecisionTree | HybridModel) -> str:
    if isinstance(model, HybridModel):
        doc = hybrid_to_dict(model)
    else:
        doc = tree_to_dict(model)
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def save_model(model: DecisionTree | HybridModel, path: str | Path) -> None:
    try:
        Path(path).write_text(model_to_json(model), encoding="utf-8")
    except OSError as e:
        raise IoFailureError(f"cannot write {path}: {e}") from e


def load_model(path: str | Path) -> DecisionTree | HybridModel:
    """Load a tree or hybrid bundle; rejects unsupported model versions."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise IoFailureError(f"cannot read {path}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaViolationError(f"{path}: not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise SchemaViolationError(f"{path}: expected a JSON object")
    version = str(doc.get("model_version"))
    if version != SUPPORTED_MODEL_VERSION:
        raise VersionMismatchError(version, SUPPORTED_MODEL_VERSION)
    if doc.get("kind") == "hybrid":
        return hybrid_from_dict(doc)
    return parse_knowledge_model(doc)
