"""Cohorts end to end: synthesize a labeled population, round-trip it through
CSV, and preprocess one feature column.

Run:  python demos/01_cohort_and_labels.py
"""

from collections import Counter

from diabetes_cdss import (
    impute_missing,
    label_by_ada,
    normalize,
    parse_cohort,
    PatientRecord,
    reference_statistics,
    serialize_cohort,
    stratified_split,
    synthesize_cohort,
)

# 1. A synthetic population parameterized by published group statistics.
stats = reference_statistics()
cohort = synthesize_cohort(stats, n=648, seed=7)
print(f"generated {len(cohort)} records")
print("class mix:", dict(Counter(r.label.slug for r in cohort.records)))

# 2. The four-way staging rules on single patients.
cases = [
    PatientRecord(id="a", fpg=130.0),
    PatientRecord(id="b", fpg=110.0, hba1c=5.9),
    PatientRecord(id="c", fpg=95.0, hba1c=5.4, bmi=22.0, family_history=True),
]
for rec in cases:
    print(f"{rec.id}: fpg={rec.fpg} hba1c={rec.hba1c} -> {label_by_ada(rec).slug}")

# 3. CSV round trip: serialize, reparse, identical records.
text = serialize_cohort(cohort)
again = parse_cohort(text)
assert again.records == cohort.records
print("CSV round trip ok:", text.splitlines()[0][:60], "...")

# 4. Train/test split preserving class proportions, deterministic per seed.
train, test = stratified_split(cohort, train_fraction=0.7, seed=1)
print(f"split: {len(train)} train / {len(test)} test")

# 5. Feature preprocessing: imputation fills with the observed mean,
#    normalization is fit on training data and reapplied elsewhere.
fpg = train.column("fpg")
fpg[3] = None  # pretend one measurement is missing
filled = impute_missing(fpg)
print(f"imputed fpg[3] = {filled[3]:.1f}")
normalized, params = normalize(filled)
print(f"normalization: mu={params.mu:.1f} sigma={params.sigma:.1f}")
held_out, _ = normalize(test.column("fpg"), params)  # reuse training params
print(f"first held-out z-score: {held_out[0]:.3f}")
