"""Regenerate the console contract fixtures.

Runs the deterministic pipeline (frozen default config), serves the resulting
hybrid bundle in-process, replays the canned intake forms and what-if
scenarios, and freezes every request/response pair into
frontend/fixtures/console_fixtures.json. The frontend test suite asserts its
rendering and validation against these captured responses.

Usage: python3 scripts/generate_console_fixtures.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from diabetes_cdss.pipeline import default_config_doc, parse_config, run_pipeline
from diabetes_cdss.service import ModelHost, create_app

REPO = Path(__file__).resolve().parent.parent
TARGET = REPO / "frontend" / "fixtures" / "console_fixtures.json"

# 20 canned intake forms covering every class, boundaries, fallbacks, blending.
INTAKE_FORMS = [
    {"hba1c": 7.0, "fpg": 140.0, "bmi": 27.0},
    {"hba1c": 7.0, "fpg": 140.0, "bmi": 23.0},
    {"hba1c": 5.0},
    {"hba1c": 6.5},
    {"fpg": 180.0, "bmi": 31.0},
    {"hba1c": 7.2, "fpg": 110.0, "bmi": 26.0},
    {"hba1c": 6.1, "fpg": 150.0, "bmi": 28.0, "alpha": 0.5},
    {"hba1c": 5.4, "fpg": 95.0, "bmi": 22.0, "family_history": True},
    {
        "age": 58, "sex": "female", "family_history": True, "physical_activity": "low",
        "bmi": 31.4, "fpg": 162.5, "hba1c": 8.1, "sbp": 145.0, "dbp": 92.0,
        "triglycerides": 210.0, "hdl": 38.0, "waist": 108.0, "symptoms": True,
        "balanced_diet": False, "htn_medication": True,
    },
    {"hba1c": 6.9, "fpg": 126.0, "bmi": 30.0},
    {"hba1c": 6.51, "fpg": 127.0, "bmi": 25.0},
    {"ogtt_2h": 210.0, "bmi": 24.0},
    {"random_glucose": 250.0, "symptoms": True, "bmi": 27.5},
    {"fpg": 101.0, "hba1c": 5.8, "bmi": 24.0, "physical_activity": "high"},
    {"hba1c": 9.4, "fpg": 240.0, "bmi": 36.0, "alpha": 0.0},
    {"hba1c": 9.4, "fpg": 240.0, "bmi": 36.0, "alpha": 1.0},
    {"hba1c": 4.9, "fpg": 88.0, "bmi": 21.0, "sex": "male", "physical_activity": "high"},
    {"hba1c": 6.2, "bmi": 29.0, "family_history": False},
    {"fpg": 124.9, "hba1c": 6.4, "bmi": 25.1},
    {"age": 82, "hba1c": 7.8, "fpg": 155.0, "bmi": 26.0, "htn_medication": True},
]

# Requests the server must reject; the console must block them client-side.
INVALID_FORMS = [
    {"bmi": 30.0},
    {"fpg": 7.2},
    {"hba1c": 7.0, "bmi": 300.0},
    {"sex": "other", "fpg": 100.0},
    {"glucose": 120.0, "fpg": 100.0},
    {"fpg": 140.0, "alpha": 1.5},
    {"fpg": 140.0, "sbp": 80.0, "dbp": 95.0},
    {"hba1c": 25.0},
]

WHATIF_CASES = [
    {"base": {"hba1c": 7.0, "fpg": 140.0, "bmi": 27.0}, "deltas": {"bmi": 23.0}},
    {"base": {"hba1c": 7.0, "fpg": 140.0, "bmi": 27.0}, "deltas": {}},
    {"base": {"hba1c": 5.0}, "deltas": {"hba1c": 7.1}},
]


def main():
    with tempfile.TemporaryDirectory(prefix="cdss-fixtures-") as tmp:
        cfg = parse_config(default_config_doc())
        artifacts = run_pipeline(cfg, tmp)
        host = ModelHost.from_path(artifacts["hybrid.json"])
        client = TestClient(create_app(host))

        diagnose = []
        for form in INTAKE_FORMS + INVALID_FORMS:
            resp = client.post("/api/v1/diagnose", json=form)
            entry = {"request": form, "status": resp.status_code}
            if resp.status_code == 200:
                entry["response"] = resp.json()
            else:
                entry["errors"] = resp.json()["errors"]
            diagnose.append(entry)

        whatif = []
        for case in WHATIF_CASES:
            resp = client.post("/api/v1/whatif", json=case)
            whatif.append({"request": case, "status": resp.status_code, "response": resp.json()})

        doc = {
            "fixture_version": 1,
            "model_summary": client.get("/api/v1/model/summary").json(),
            "diagnose": diagnose,
            "whatif": whatif,
        }

    TARGET.parent.mkdir(parents=True, exist_ok=True)
    TARGET.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    ok = sum(1 for d in diagnose if d["status"] == 200)
    print(f"wrote {TARGET} ({ok} accepted, {len(diagnose) - ok} rejected, {len(whatif)} what-if)")


if __name__ == "__main__":
    main()
