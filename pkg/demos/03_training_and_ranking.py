"""Learning trees from data: split criteria, feature elimination, and the
accuracy/rules/attributes ranking that picks the deployed learner.

Run:  python demos/03_training_and_ranking.py
"""

from diabetes_cdss import (
    SplitCriterion,
    TrainHyperparams,
    classify,
    concordance_rate,
    enumerate_rules,
    reference_statistics,
    rank_algorithms,
    rfe_select,
    stratified_split,
    synthesize_cohort,
    train_tree,
)

stats = reference_statistics()
cohort = synthesize_cohort(stats, n=900, seed=3)
train, test = stratified_split(cohort, 0.72, seed=4)

# 1. Train one tree per split criterion and collect ranking inputs.
entries = []
for criterion in SplitCriterion:
    tree = train_tree(train, TrainHyperparams(criterion=criterion, min_leaf=2))
    preds = [classify(tree, r)[0] for r in test.records]
    acc = concordance_rate(preds, test.labels())
    rules = len(enumerate_rules(tree))
    attrs = len(tree.attributes_used())
    entries.append((criterion.value, acc, rules, attrs))
    print(f"{criterion.value:11s} accuracy={acc:.3f} rules={rules:3d} attributes={attrs}")

# 2. Rank: accuracy, parsimony of rules, parsimony of attributes.
ranked = rank_algorithms(entries)
print("\nranking:")
for r in ranked:
    print(f"   {r.name:11s} rank={r.rank:.3f}")
print("selected:", ranked[0].name)

# 3. Recursive feature elimination keeps the load-bearing features.
kept = rfe_select(train, k=5, hyper=TrainHyperparams(min_leaf=2))
print("\ntop-5 features by RFE:", kept)

# 4. The learned root lands on a clinical threshold.
best = train_tree(train, TrainHyperparams(min_leaf=2))
root = best.nodes[best.root]
print(f"learned root: {root.attribute} @ {root.branches[0].predicate.value:.3g}")
