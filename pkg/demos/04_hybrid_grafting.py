"""Hybridization: graft learned subtrees into the expert tree's blind spots
and blend scores between the two models.

Run:  python demos/04_hybrid_grafting.py
"""

from diabetes_cdss import (
    PatientRecord,
    TrainHyperparams,
    blend_predict,
    build_hybrid,
    build_reference_ckm,
    classify,
    coverage_report,
    enumerate_rules,
    reference_statistics,
    synthesize_cohort,
    train_tree,
)

stats = reference_statistics()
ckm = build_reference_ckm()
pm = train_tree(synthesize_cohort(stats, 650, seed=5), TrainHyperparams(min_leaf=2))

# 1. Merge: the expert tree keeps every rule; uncovered regions and missing-
#    value routes gain grafted learned subtrees.
model = build_hybrid(ckm, pm, alpha=0.5)
print(f"expert rules:  {len(enumerate_rules(ckm))}")
print(f"merged rules:  {len(enumerate_rules(model.rckm))}")
print("grafts:")
for g in model.graft_log:
    print(f"   {g.kind:7s} at {g.host_node} on {g.attribute} ({g.region})")

# 2. A patient without an HbA1c measurement: the expert tree could only fall
#    back to its conservative default; the merged tree descends learned logic.
patient = PatientRecord(id="p", fpg=170.0, bmi=31.0, family_history=True)
print("\nexpert says:", classify(ckm, patient)[0].slug)
print("merged says:", classify(model.rckm, patient)[0].slug)

# 3. Score blending interpolates between the two components.
full = PatientRecord(id="q", hba1c=6.1, fpg=150.0, bmi=28.0)
for alpha in (1.0, 0.5, 0.0):
    cls, dist = blend_predict(model, full, alpha=alpha)
    rounded = [round(p, 2) for p in dist]
    print(f"alpha={alpha}: {cls.slug:18s} {rounded}")

# 4. Coverage: fraction of patients classified without any fallback hop.
cohort = synthesize_cohort(stats, 400, seed=6)
print("\ncoverage expert:", coverage_report(ckm, cohort).coverage)
print("coverage merged:", coverage_report(model.rckm, cohort).coverage)
