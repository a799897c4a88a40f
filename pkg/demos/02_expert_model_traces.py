"""The expert staging tree: white-box classification with a full decision
trace, rule extraction, and structural validation.

Run:  python demos/02_expert_model_traces.py
"""

from diabetes_cdss import (
    PatientRecord,
    build_reference_ckm,
    classify,
    clinical_markers,
    enumerate_rules,
    tree_to_json,
    validate_tree,
)

ckm = build_reference_ckm()

# 1. Every leaf is a human-readable rule.
print("expert rules:")
for rule in enumerate_rules(ckm):
    print("  ", rule.render())

# 2. Classification returns the decision path, not just the class.
patient = PatientRecord(id="p1", hba1c=7.0, fpg=140.0, bmi=27.0)
cls, path = classify(ckm, patient)
print(f"\npatient p1 -> {cls.slug}")
for step in path.steps:
    marker = " (fallback)" if step.fallback else ""
    print(f"   {step.node_id}: {step.description}{marker}")

# 3. Symptomatology markers ride along with the trace.
print("markers:", clinical_markers(patient))

# 4. Missing values follow the conservative default branch and are flagged.
cls2, path2 = classify(ckm, PatientRecord(id="p2", fpg=180.0, bmi=31.0))
print(f"\np2 (no hba1c) -> {cls2.slug}; fallback taken: {path2.took_fallback}")

# 5. Structural audit: gaps, overlaps, unreachable nodes.
print("findings on the reference tree:", validate_tree(ckm) or "none")

# 6. The model serializes to a versioned JSON document.
print("\nserialized model starts with:", tree_to_json(ckm)[:80].replace("\n", " "))
