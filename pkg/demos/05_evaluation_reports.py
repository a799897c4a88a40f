"""Evaluation harness: confusion matrices, per-class metrics, chance-corrected
agreement, age-band subgroups, and the key-indicator feature comparison.

Run:  python demos/05_evaluation_reports.py
"""

from diabetes_cdss import (
    TrainHyperparams,
    cohens_kappa,
    confusion_matrix,
    feature_set_comparison,
    per_class_metrics,
    reference_statistics,
    stratified_split,
    subgroup_report,
    synthesize_cohort,
    train_tree,
)
from diabetes_cdss.cohort import CLASS_ORDER, FEATURES
from diabetes_cdss.metrics import predictions, render_age_table, render_confusion_table

stats = reference_statistics()
cohort = synthesize_cohort(stats, 1000, seed=8)
train, test = stratified_split(cohort, 0.65, seed=9)
model = train_tree(train, TrainHyperparams(min_leaf=2))

# 1. Confusion matrix and the table layout used in reports.
truth = test.labels()
preds = predictions(model, test)
cm = confusion_matrix(truth, preds)
per_class = {c: per_class_metrics(cm, c) for c in CLASS_ORDER}
print(render_confusion_table(cm, per_class, title="learned model, held-out split"))

# 2. Chance-corrected agreement.
agreement = cohens_kappa(cm)
print(f"observed agreement {agreement.p_o:.4f}, chance {agreement.p_e:.4f}, "
      f"kappa {agreement.kappa:.4f}")

# 3. Diagnostic accuracy by age band.
bands = subgroup_report(test, model)
print()
print(render_age_table(bands, title="diagnostic accuracy by age group"))

# 4. All features (set A) versus the key indicators only (set B).
set_a = {f.name for f in FEATURES}
set_b = {"bmi", "hba1c", "fpg"}
conc_a, conc_b = feature_set_comparison(model, test, set_a, set_b)
print(f"concordance with all features:     {conc_a:.4f}")
print(f"concordance with key indicators:   {conc_b:.4f}")
