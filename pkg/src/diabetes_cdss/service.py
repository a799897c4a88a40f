"""Diagnosis service: stateless request validation and classification with
white-box decision traces, what-if comparison, and the HTTP API.

A request is diagnosed against an immutable model snapshot; ModelHost.swap
replaces the snapshot atomically, so in-flight requests finish on the model
they started with.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from .cohort import FEATURE_BY_NAME, PatientRecord
from .errors import FieldValidationError, NoModelLoadedError
from .hybrid import HybridModel, blend_predict
from .knowledge import DecisionTree, classify, clinical_markers, enumerate_rules
from .persistence import load_model

GLYCEMIC_FIELDS = ("fpg", "hba1c", "ogtt_2h", "random_glucose")

_MMOL_HINT = "value looks like mmol/L; supply mg/dL"
_A1C_HINT = "value looks like mmol/mol; supply percent"


def validate_request(payload: dict) -> tuple[PatientRecord, float | None]:
    """Parse a diagnosis payload into a PatientRecord plus optional alpha.

    Collects every field problem before failing so clients can render
    per-field messages. Units are fixed (mg/dL, percent, kg/m2).
    """
    problems: list[tuple[str, str]] = []
    kwargs: dict = {}
    alpha = None

    for key, raw in payload.items():
        if key == "alpha":
            if raw is None:
                continue
            try:
                alpha = float(raw)
            except (TypeError, ValueError):
                problems.append(("alpha", f"not a number: {raw!r}"))
                continue
            if not 0.0 <= alpha <= 1.0:
                problems.append(("alpha", f"must be in [0, 1], got {alpha}"))
            continue
        feat = FEATURE_BY_NAME.get(key)
        if feat is None:
            problems.append((key, "unknown field"))
            continue
        if raw is None:
            continue
        if feat.kind == "numeric":
            try:
                kwargs[key] = float(raw)
            except (TypeError, ValueError):
                problems.append((key, f"not a number: {raw!r}"))
        elif feat.values == (True, False):
            if isinstance(raw, bool):
                kwargs[key] = raw
            elif isinstance(raw, str) and raw.lower() in ("true", "false"):
                kwargs[key] = raw.lower() == "true"
            else:
                problems.append((key, f"expected true/false, got {raw!r}"))
        else:
            if raw in feat.values:
                kwargs[key] = raw
            else:
                problems.append((key, f"expected one of {feat.values}, got {raw!r}"))

    record = PatientRecord(id="request", **{k: v for k, v in kwargs.items() if k in FEATURE_BY_NAME})
    for issue in record.invariant_problems():
        field = issue.split("=", 1)[0]
        hint = ""
        value = kwargs.get(field)
        if field in ("fpg", "ogtt_2h", "random_glucose") and isinstance(value, float) and value <= 20:
            hint = f" ({_MMOL_HINT})"
        if field == "hba1c" and isinstance(value, float) and value >= 20:
            hint = f" ({_A1C_HINT})"
        problems.append((field, issue + hint))
    if all(kwargs.get(f) is None for f in GLYCEMIC_FIELDS):
        problems.append(
            ("glycemic", "at least one of fpg, hba1c, ogtt_2h, random_glucose is required")
        )
    if problems:
        raise FieldValidationError(problems)
    return record, alpha


@dataclass(frozen=True)
class ModelSnapshot:
    model: DecisionTree | HybridModel
    source: str

    @property
    def white_box(self) -> DecisionTree:
        return self.model.rckm if isinstance(self.model, HybridModel) else self.model

    @property
    def version(self) -> str:
        return self.white_box.model_version

    def summary(self) -> dict:
        tree = self.white_box
        info = {
            "model_version": self.version,
            "kind": "hybrid" if isinstance(self.model, HybridModel) else "tree",
            "source": self.source,
            "nodes": len(tree.nodes),
            "leaves": tree.leaf_count(),
            "rules": len(enumerate_rules(tree)),
            "attributes": sorted(tree.attributes_used()),
            "annotations": list(tree.annotations),
        }
        if isinstance(self.model, HybridModel):
            info["alpha"] = self.model.alpha
            info["grafts"] = len(self.model.graft_log)
        return info


class ModelHost:
    """Holds the current model snapshot; swap() is an atomic replacement."""

    def __init__(self, snapshot: ModelSnapshot | None = None):
        self._snapshot = snapshot

    @classmethod
    def from_path(cls, path: str | Path) -> "ModelHost":
        return cls(ModelSnapshot(model=load_model(path), source=str(path)))

    def swap(self, model: DecisionTree | HybridModel, source: str = "swap") -> None:
        self._snapshot = ModelSnapshot(model=model, source=source)

    def snapshot(self) -> ModelSnapshot:
        snap = self._snapshot
        if snap is None:
            raise NoModelLoadedError("no model loaded")
        return snap


@dataclass(frozen=True)
class DiagnosisResponse:
    glycemic_class: str
    distribution: tuple[float, float, float, float]
    path: tuple[dict, ...]
    flags: tuple[str, ...]
    model_version: str
    alpha: float | None  # None means pure white-box classification

    def to_dict(self) -> dict:
        return {
            "class": self.glycemic_class,
            "distribution": list(self.distribution),
            "path": [dict(s) for s in self.path],
            "flags": list(self.flags),
            "model_version": self.model_version,
            "alpha": self.alpha,
        }


def _path_steps(path) -> tuple[dict, ...]:
    return tuple(
        {
            "node": s.node_id,
            "attribute": s.attribute,
            "test": s.description,
            "branch": s.branch_taken,
            "observed": s.observed,
            "fallback": s.fallback,
        }
        for s in path.steps
    )


def diagnose(snapshot: ModelSnapshot, record: PatientRecord, alpha: float | None = None) -> DiagnosisResponse:
    """Classify one request against a snapshot.

    Default inference is the white-box tree (the R-CKM for hybrid bundles);
    an explicit alpha < 1 on a hybrid snapshot blends the expert one-hot with
    the learned distribution instead. Stateless across calls.
    """
    tree = snapshot.white_box
    cls, path = classify(tree, record)
    distribution = path.distribution
    effective_alpha = None
    if alpha is not None and alpha < 1.0:
        if not isinstance(snapshot.model, HybridModel):
            raise FieldValidationError([("alpha", "blending requires a hybrid model")])
        cls, distribution = blend_predict(snapshot.model, record, alpha=alpha)
        effective_alpha = alpha

    flags = []
    for step in path.steps:
        if step.fallback:
            flags.append(f"fallback: {step.description}")
    flags.extend(clinical_markers(record, tree.annotations or ()))
    return DiagnosisResponse(
        glycemic_class=cls.slug,
        distribution=tuple(distribution),
        path=_path_steps(path),
        flags=tuple(flags),
        model_version=snapshot.version,
        alpha=effective_alpha,
    )


def diagnose_payload(snapshot: ModelSnapshot, payload: dict) -> DiagnosisResponse:
    record, alpha = validate_request(payload)
    return diagnose(snapshot, record, alpha)


def whatif(snapshot: ModelSnapshot, base_payload: dict, deltas: dict) -> dict:
    """Diagnose a base request and a modified copy; report where the decision
    paths first diverge."""
    for key in deltas:
        if key != "alpha" and key not in FEATURE_BY_NAME:
            raise FieldValidationError([(key, "unknown field")])
    base = diagnose_payload(snapshot, base_payload)
    merged = dict(base_payload)
    merged.update(deltas)
    modified = diagnose_payload(snapshot, merged)

    divergence = None
    for i, (a, b) in enumerate(zip(base.path, modified.path)):
        if a["node"] != b["node"] or a["branch"] != b["branch"]:
            divergence = {
                "index": i,
                "node": a["node"],
                "attribute": a["attribute"],
                "base_branch": a["branch"],
                "modified_branch": b["branch"],
            }
            break
    if divergence is None and len(base.path) != len(modified.path):
        i = min(len(base.path), len(modified.path))
        divergence = {"index": i, "node": None, "attribute": None,
                      "base_branch": None, "modified_branch": None}
    return {
        "base": base.to_dict(),
        "modified": modified.to_dict(),
        "divergence": divergence,
        "changed": base.glycemic_class != modified.glycemic_class,
    }


# ---------------------------------------------------------------------------
# HTTP API

def create_app(host: ModelHost):
    from fastapi import Body, FastAPI
    from fastapi.responses import JSONResponse

    app = FastAPI(title="diabetes-cdss", version="0.1.0")

    def _error_response(exc: FieldValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=422,
            content={"errors": [{"field": f, "message": m} for f, m in exc.problems]},
        )

    @app.get("/api/v1/health")
    def health():
        loaded = True
        try:
            host.snapshot()
        except NoModelLoadedError:
            loaded = False
        return {"status": "ok", "model_loaded": loaded}

    @app.get("/api/v1/model/summary")
    def model_summary():
        try:
            return host.snapshot().summary()
        except NoModelLoadedError:
            return JSONResponse(status_code=503, content={"error": "no model loaded"})

    @app.post("/api/v1/diagnose")
    def diagnose_endpoint(payload: dict = Body(...)):
        try:
            snap = host.snapshot()
        except NoModelLoadedError:
            return JSONResponse(status_code=503, content={"error": "no model loaded"})
        try:
            return diagnose_payload(snap, payload).to_dict()
        except FieldValidationError as e:
            return _error_response(e)

    @app.post("/api/v1/whatif")
    def whatif_endpoint(payload: dict = Body(...)):
        try:
            snap = host.snapshot()
        except NoModelLoadedError:
            return JSONResponse(status_code=503, content={"error": "no model loaded"})
        base = payload.get("base")
        deltas = payload.get("deltas", {})
        if not isinstance(base, dict):
            return _error_response(FieldValidationError([("base", "required object")]))
        if not isinstance(deltas, dict):
            return _error_response(FieldValidationError([("deltas", "must be an object")]))
        try:
            return whatif(snap, base, deltas)
        except FieldValidationError as e:
            return _error_response(e)

    return app


def default_host() -> ModelHost:
    """Host initialized from $CDSS_MODEL_PATH when set."""
    path = os.environ.get("CDSS_MODEL_PATH")
    if path:
        return ModelHost.from_path(path)
    return ModelHost()
