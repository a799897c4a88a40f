import itertools
import math

import numpy as np
import pytest

from conftest import make_dataset

from diabetes_cdss import (
    GlycemicClass,
    SplitCriterion,
    TrainHyperparams,
    best_split,
    classify,
    predict_proba,
    rank_algorithms,
    rfe_select,
    synthesize_cohort,
    train_tree,
)
from diabetes_cdss.errors import (
    EmptyDatasetError,
    InvalidInputError,
    InvalidKError,
    UnlabeledRecordError,
)
from diabetes_cdss.induction import rank_value, train_tree_with_report

ALL_CRITERIA = list(SplitCriterion)


# ---------------------------------------------------------------------------
# Independent split oracle: recomputes every candidate from scratch.

def oracle_gini(counts):
    n = sum(counts)
    return 1.0 - sum((c / n) * (c / n) for c in counts)


def oracle_entropy(counts):
    n = sum(counts)
    h = 0.0
    for c in counts:
        if c:
            p = c / n
            h -= p * math.log2(p)
    return h


def oracle_score(parent, branches, criterion):
    n = sum(parent)
    if criterion is SplitCriterion.GINI:
        dec = oracle_gini(parent)
        for bc in branches:
            dec -= (sum(bc) / n) * oracle_gini(bc)
        return dec
    if criterion in (SplitCriterion.INFO_GAIN, SplitCriterion.GAIN_RATIO):
        gain = oracle_entropy(parent)
        info = 0.0
        for bc in branches:
            w = sum(bc) / n
            gain -= w * oracle_entropy(bc)
            if w:
                info -= w * math.log2(w)
        if criterion is SplitCriterion.INFO_GAIN:
            return gain
        return gain / info if info > 0 else 0.0
    chi2 = 0.0
    for j in range(4):
        col = parent[j]
        if col == 0:
            continue
        for bc in branches:
            e = sum(bc) * col / n
            if e > 0:
                chi2 += (bc[j] - e) ** 2 / e
    return chi2


def oracle_best_split(columns, labels, criterion):
    """Exhaustive enumeration, recomputing counts per candidate."""
    best = None  # (score, tie_key, descriptor)
    parent = [0, 0, 0, 0]
    for y in labels:
        parent[y.value] += 1
    if max(parent) == len(labels) or len(labels) < 2:
        return None
    for attr in columns:
        pairs = [(v, labels[i]) for i, v in enumerate(columns[attr]) if v is not None]
        if len(pairs) < 2:
            continue
        obs = [0, 0, 0, 0]
        for _, y in pairs:
            obs[y.value] += 1
        sample = pairs[0][0]
        if isinstance(sample, (bool, str)):
            cats = sorted({v for v, _ in pairs}, key=str)
            if len(cats) < 2:
                continue
            head, rest = cats[0], cats[1:]
            for r in range(0, len(rest) + 1):
                for combo in itertools.combinations(rest, r):
                    left_set = {head, *combo}
                    if len(left_set) == len(cats):
                        continue
                    lc = [0, 0, 0, 0]
                    rc = [0, 0, 0, 0]
                    for v, y in pairs:
                        (lc if v in left_set else rc)[y.value] += 1
                    score = oracle_score(obs, [lc, rc], criterion)
                    left_sorted = sorted(left_set, key=str)
                    key = (attr, 1, 0.0, ",".join(str(v) for v in left_sorted))
                    desc = ("partition", attr, tuple(left_sorted))
                    if score > 1e-12 and (
                        best is None
                        or score > best[0]
                        or (score == best[0] and key < best[1])
                    ):
                        best = (score, key, desc)
        else:
            distinct = sorted({v for v, _ in pairs})
            for lo, hi in zip(distinct, distinct[1:]):
                t = (lo + hi) / 2.0
                lc = [0, 0, 0, 0]
                rc = [0, 0, 0, 0]
                for v, y in pairs:
                    (lc if v <= t else rc)[y.value] += 1
                score = oracle_score(obs, [lc, rc], criterion)
                key = (attr, 0, t, "")
                if score > 1e-12 and (
                    best is None
                    or score > best[0]
                    or (score == best[0] and key < best[1])
                ):
                    best = (score, key, ("threshold", attr, t))
    return best[2] if best else None


def assert_matches_oracle(columns, labels, criterion):
    got = best_split(columns, labels, criterion)
    want = oracle_best_split(columns, labels, criterion)
    if want is None:
        assert got is None
        return
    kind, attr, detail = want
    assert got is not None
    assert got.attribute == attr
    if kind == "threshold":
        assert got.threshold == detail
    else:
        assert tuple(sorted(got.partition[0], key=str)) == detail


# ---------------------------------------------------------------------------
# best_split

def test_perfect_separator_on_fpg():
    columns = {"fpg": [90.0, 95.0, 100.0, 130.0, 140.0, 150.0]}
    labels = [GlycemicClass.NO_DIABETES] * 3 + [GlycemicClass.VERIFIED_DIABETES] * 3
    for criterion in ALL_CRITERIA:
        cand = best_split(columns, labels, criterion)
        assert cand.attribute == "fpg"
        assert cand.threshold == 115.0
        # children are pure
        for bc in cand.branch_counts:
            assert sorted(bc)[-2] == 0


def test_six_record_two_feature_table_equals_oracle():
    columns = {
        "a": [1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
        "b": [True, False, True, False, True, False],
    }
    labels = [
        GlycemicClass.NO_DIABETES,
        GlycemicClass.AT_RISK,
        GlycemicClass.NO_DIABETES,
        GlycemicClass.AT_RISK,
        GlycemicClass.PREDIABETES,
        GlycemicClass.AT_RISK,
    ]
    for criterion in ALL_CRITERIA:
        assert_matches_oracle(columns, labels, criterion)


def test_constant_features_yield_none():
    columns = {"a": [3.0] * 4, "b": ["x"] * 4}
    labels = [GlycemicClass.NO_DIABETES, GlycemicClass.AT_RISK] * 2
    for criterion in ALL_CRITERIA:
        assert best_split(columns, labels, criterion) is None


def test_uniform_labels_yield_none():
    columns = {"a": [1.0, 2.0, 3.0]}
    labels = [GlycemicClass.AT_RISK] * 3
    assert best_split(columns, labels, SplitCriterion.GINI) is None


def test_random_tables_match_oracle_all_criteria():
    rng = np.random.default_rng(1234)
    for trial in range(25):
        n = int(rng.integers(4, 30))
        columns = {
            "n1": list(rng.normal(0, 1, n)),
            "n2": list(rng.integers(0, 4, n).astype(float)),
            "c1": [bool(b) for b in rng.integers(0, 2, n)],
            "c2": [str(x) for x in rng.choice(["u", "v", "w"], n)],
        }
        labels = [GlycemicClass(int(v)) for v in rng.integers(0, 4, n)]
        for criterion in ALL_CRITERIA:
            assert_matches_oracle(columns, labels, criterion)


def test_branch_counts_sum_to_parent():
    rng = np.random.default_rng(7)
    columns = {"x": list(rng.normal(0, 1, 40))}
    labels = [GlycemicClass(int(v)) for v in rng.integers(0, 4, 40)]
    cand = best_split(columns, labels, SplitCriterion.GINI)
    assert cand.impurity_decrease >= 0
    totals = [sum(bc[j] for bc in cand.branch_counts) for j in range(4)]
    want = [sum(1 for y in labels if y.value == j) for j in range(4)]
    assert totals == want


# ---------------------------------------------------------------------------
# train_tree

def test_pure_labels_give_single_leaf():
    ds = make_dataset([{"fpg": 130.0 + i, "label": GlycemicClass.VERIFIED_DIABETES} for i in range(5)])
    tree = train_tree(ds, TrainHyperparams())
    assert len(tree.nodes) == 1
    assert tree.nodes[tree.root].kind == "leaf"


def test_two_threshold_dataset_recovers_greedy_structure():
    rows = [
        {"fpg": 90.0, "bmi": 20.0, "label": GlycemicClass.NO_DIABETES},
        {"fpg": 92.0, "bmi": 30.0, "label": GlycemicClass.NO_DIABETES},
        {"fpg": 94.0, "bmi": 21.0, "label": GlycemicClass.NO_DIABETES},
        {"fpg": 96.0, "bmi": 29.0, "label": GlycemicClass.NO_DIABETES},
        {"fpg": 130.0, "bmi": 22.0, "label": GlycemicClass.PREDIABETES},
        {"fpg": 132.0, "bmi": 23.0, "label": GlycemicClass.PREDIABETES},
        {"fpg": 134.0, "bmi": 28.0, "label": GlycemicClass.VERIFIED_DIABETES},
        {"fpg": 136.0, "bmi": 29.0, "label": GlycemicClass.VERIFIED_DIABETES},
    ]
    ds = make_dataset(rows)
    tree = train_tree(ds, TrainHyperparams(criterion=SplitCriterion.GINI))
    root = tree.nodes[tree.root]
    assert root.attribute == "fpg"
    assert root.branches[0].predicate.value == pytest.approx(113.0)
    # right child splits bmi between 23 and 28
    right = tree.nodes[root.branches[1].child]
    assert right.attribute == "bmi"
    assert right.branches[0].predicate.value == pytest.approx(25.5)
    for r in ds.records:
        assert classify(tree, r)[0] is r.label


def test_full_depth_training_reaches_perfect_accuracy(stats):
    ds = synthesize_cohort(stats, 120, seed=5)
    tree = train_tree(ds, TrainHyperparams(max_depth=32, min_leaf=1))
    hits = sum(1 for r in ds.records if classify(tree, r)[0] is r.label)
    assert hits == len(ds)


def test_max_depth_one_gives_stump(labeled_toy_dataset):
    tree = train_tree(labeled_toy_dataset, TrainHyperparams(max_depth=1))
    internal = [n for n in tree.nodes.values() if n.kind == "internal"]
    assert len(internal) == 1


def test_min_leaf_blocks_small_children():
    rows = [{"fpg": 90.0 + i, "label": GlycemicClass.NO_DIABETES} for i in range(5)]
    rows.append({"fpg": 130.0, "label": GlycemicClass.VERIFIED_DIABETES})
    ds = make_dataset(rows)
    tree = train_tree(ds, TrainHyperparams(min_leaf=2))
    assert tree.nodes[tree.root].kind == "leaf"


def test_missing_values_route_to_majority_branch():
    rows = [{"fpg": 90.0 + i, "hba1c": 5.0, "label": GlycemicClass.NO_DIABETES} for i in range(4)]
    rows += [{"fpg": 130.0 + i, "hba1c": 7.0, "label": GlycemicClass.VERIFIED_DIABETES} for i in range(2)]
    rows += [{"fpg": None, "hba1c": 5.1, "label": GlycemicClass.NO_DIABETES}]
    ds = make_dataset(rows)
    tree = train_tree(ds, TrainHyperparams())
    root = tree.nodes[tree.root]
    assert root.attribute == "fpg"
    assert root.default_child == root.branches[0].child  # majority side is "<="
    cls, path = classify(tree, make_dataset([{"fpg": None, "hba1c": 5.0}]).records[0])
    assert cls is GlycemicClass.NO_DIABETES


def test_train_rejects_empty_and_unlabeled():
    with pytest.raises(EmptyDatasetError):
        train_tree(make_dataset([]), TrainHyperparams())
    with pytest.raises(UnlabeledRecordError):
        train_tree(make_dataset([{"fpg": 100.0}]), TrainHyperparams())


def test_provenance_is_ml(labeled_toy_dataset):
    tree = train_tree(labeled_toy_dataset, TrainHyperparams())
    assert all(n.provenance == "ml" for n in tree.nodes.values())


# ---------------------------------------------------------------------------
# predict_proba

def test_predict_proba_single_leaf():
    from test_knowledge import single_leaf_tree

    tree = single_leaf_tree(GlycemicClass.PREDIABETES)
    dist = predict_proba(tree, make_dataset([{"fpg": 100.0}]).records[0])
    assert dist == (0.0, 1.0, 0.0, 0.0)


def test_predict_proba_argmax_matches_classify(stats):
    ds = synthesize_cohort(stats, 150, seed=3)
    train, test = ds, ds
    tree = train_tree(train, TrainHyperparams(min_leaf=3))
    for r in test.records[:50]:
        dist = predict_proba(tree, r)
        assert sum(dist) == pytest.approx(1.0, abs=1e-9)
        assert GlycemicClass(int(np.argmax(dist))) is classify(tree, r)[0]


# ---------------------------------------------------------------------------
# RFE

def test_rfe_keeps_all_features_in_schema_order(labeled_toy_dataset):
    names = [f.name for f in labeled_toy_dataset.schema]
    assert rfe_select(labeled_toy_dataset, len(names), TrainHyperparams()) == names


def test_rfe_fully_determining_feature_survives(stats):
    ds = synthesize_cohort(stats, 200, seed=9)
    # make hba1c fully determine a binary relabeling
    from dataclasses import replace

    records = tuple(
        replace(r, label=GlycemicClass.VERIFIED_DIABETES if r.hba1c >= 6.5 else GlycemicClass.NO_DIABETES)
        for r in ds.records
    )
    from diabetes_cdss import CohortDataset

    relabeled = CohortDataset(records=records, schema=ds.schema, provenance="test")
    selected = rfe_select(relabeled, 1, TrainHyperparams(max_depth=6))
    assert selected == ["hba1c"]


def test_rfe_invalid_k(labeled_toy_dataset):
    with pytest.raises(InvalidKError):
        rfe_select(labeled_toy_dataset, 0, TrainHyperparams())
    with pytest.raises(InvalidKError):
        rfe_select(labeled_toy_dataset, 99, TrainHyperparams())


def test_rfe_stable_across_runs(stats):
    ds = synthesize_cohort(stats, 150, seed=4)
    a = rfe_select(ds, 5, TrainHyperparams(min_leaf=2))
    b = rfe_select(ds, 5, TrainHyperparams(min_leaf=2))
    assert a == b
    assert len(a) == 5


# ---------------------------------------------------------------------------
# Ranking

def test_rank_maximal_case():
    assert rank_value(1.0, 1, 1) == pytest.approx(1.0)


def test_rank_hand_computed():
    assert rank_value(0.9, 5, 4) == pytest.approx(0.45)


def test_rank_sorts_descending_with_name_tie_break():
    ranked = rank_algorithms([
        ("zeta", 0.9, 5, 4),
        ("alpha", 0.9, 5, 4),
        ("best", 1.0, 1, 1),
    ])
    assert [r.name for r in ranked] == ["best", "alpha", "zeta"]


def test_rank_rejects_invalid_inputs():
    with pytest.raises(InvalidInputError):
        rank_value(1.2, 1, 1)
    with pytest.raises(InvalidInputError):
        rank_value(0.5, 0, 1)
    with pytest.raises(InvalidInputError):
        rank_value(0.5, 1, 0)


def test_rank_monotonicity_small_grid():
    for rules in (1, 2, 5, 10):
        for attrs in (1, 3, 7):
            base = rank_value(0.5, rules, attrs)
            assert rank_value(0.6, rules, attrs) >= base
            assert rank_value(0.5, rules + 1, attrs) <= base
            assert rank_value(0.5, rules, attrs + 1) <= base


def test_rank_ceiling_with_three_attributes_below_quoted_point():
    # With accuracy 0.898 and 3 attributes, no integer rule count can reach
    # the quoted 0.798: the ceiling is at rule_count = 1.
    ceiling = rank_value(0.898, 1, 3)
    assert ceiling == pytest.approx((0.898 + 1.0 + 1.0 / 3.0) / 3.0)
    assert ceiling < 0.798
    for rule_count in range(1, 1000):
        assert rank_value(0.898, rule_count, 3) < 0.798


# ---------------------------------------------------------------------------
# Feature-shape checks on the synthetic cohort

def test_key_feature_subset_under_tuned_pruning(stats):
    ds = synthesize_cohort(stats, 650, seed=6)
    found = False
    for min_dec in (0.003, 0.006, 0.01, 0.02, 0.04, 0.08):
        tree = train_tree(ds, TrainHyperparams(min_impurity_decrease=min_dec, min_leaf=2))
        used = tree.attributes_used()
        if 2 <= len(used) <= 3:
            assert used <= {"fpg", "hba1c", "bmi"}, f"min_dec={min_dec}: {used}"
            found = True
    assert found, "no pruning level produced a 2-3 attribute tree"


def test_synthetic_cohort_root_splits_on_glycemic_marker(stats):
    ds = synthesize_cohort(stats, 650, seed=8)
    tree = train_tree(ds, TrainHyperparams(min_leaf=2))
    root = tree.nodes[tree.root]
    assert root.attribute in ("fpg", "hba1c")
