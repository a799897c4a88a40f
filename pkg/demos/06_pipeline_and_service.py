"""The full pipeline (synthesize -> split -> train -> rank -> hybridize ->
evaluate) and the diagnosis HTTP API served from its artifacts.

Run:  python demos/06_pipeline_and_service.py
"""

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from diabetes_cdss.pipeline import default_config_doc, parse_config, run_pipeline
from diabetes_cdss.service import ModelHost, create_app

out = Path(tempfile.mkdtemp(prefix="cdss-demo-"))

# 1. One deterministic end-to-end run (seed fixed in the config).
cfg = parse_config(default_config_doc(seed=14, n=1298))
artifacts = run_pipeline(cfg, out)
report = json.loads(artifacts["report.json"].read_text())
print("artifacts in", out)
for name, m in report["models"].items():
    print(f"   {name:13s} accuracy={m['accuracy']:.4f}")
print("selected learner:", json.loads(artifacts["ranking.json"].read_text())["selected"])

# 2. Serve the hybrid bundle. (`cdss serve --model .../hybrid.json` does the
#    same over the network; TestClient keeps the demo self-contained.)
host = ModelHost.from_path(artifacts["hybrid.json"])
client = TestClient(create_app(host))

print("\nmodel summary:", client.get("/api/v1/model/summary").json())

request = {"hba1c": 7.0, "fpg": 140.0, "bmi": 27.0, "family_history": True}
response = client.post("/api/v1/diagnose", json=request).json()
print("\ndiagnosis:", response["class"])
for step in response["path"]:
    print("   ", step["test"])
print("flags:", response["flags"])

# 3. What-if: lower the BMI and watch the decision flip at the BMI node.
whatif = client.post(
    "/api/v1/whatif", json={"base": request, "deltas": {"bmi": 23.0}}
).json()
print(f"\nwhat-if bmi 27 -> 23: {whatif['base']['class']} -> {whatif['modified']['class']}")
print("first divergence:", whatif["divergence"])

# 4. Validation errors come back per field.
bad = client.post("/api/v1/diagnose", json={"fpg": 7.2})
print("\nmmol/L value ->", bad.status_code, bad.json()["errors"][0]["message"])
