"""Impurity-based decision-tree learning with pluggable split criteria,
recursive feature elimination, and the algorithm-ranking score.

Training is a pure, single-threaded function of (dataset, hyperparameters);
no randomness is involved, so retraining reproduces the same tree.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .cohort import CLASS_ORDER, CohortDataset, GlycemicClass
from .errors import EmptyDatasetError, InvalidInputError, InvalidKError, UnlabeledRecordError
from .knowledge import Branch, DecisionTree, Predicate, TreeNode, _check_structure

#: Scores at or below this are treated as "no improvement".
SCORE_EPS = 1e-12


class SplitCriterion(str, enum.Enum):
    GINI = "gini"              # CART-style
    INFO_GAIN = "info_gain"    # plain decision-tree information gain
    GAIN_RATIO = "gain_ratio"  # J48-style normalized gain
    CHI_SQUARE = "chi_square"  # CHAID-style Pearson statistic, binary splits


@dataclass(frozen=True)
class TrainHyperparams:
    criterion: SplitCriterion = SplitCriterion.GINI
    max_depth: int = 12
    min_leaf: int = 1
    min_impurity_decrease: float = 0.0

    def __post_init__(self):
        if self.max_depth < 1:
            raise InvalidInputError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.min_leaf < 1:
            raise InvalidInputError(f"min_leaf must be >= 1, got {self.min_leaf}")
        if self.min_impurity_decrease < 0:
            raise InvalidInputError("min_impurity_decrease must be >= 0")


@dataclass(frozen=True)
class SplitCandidate:
    """Best split found at a node.

    impurity_decrease is the criterion's own score: impurity decrease for
    gini/info_gain, the normalized ratio for gain_ratio, and the Pearson
    statistic for chi_square. Always >= 0.
    """

    attribute: str
    impurity_decrease: float
    branch_counts: tuple[tuple[int, ...], ...]
    threshold: float | None = None
    partition: tuple[tuple, tuple] | None = None

    def tie_key(self):
        if self.threshold is not None:
            return (self.attribute, 0, self.threshold, "")
        left = ",".join(str(v) for v in self.partition[0])
        return (self.attribute, 1, 0.0, left)


# ---------------------------------------------------------------------------
# Criterion scores (computed from integer class-count vectors)

def _gini(counts, total: int) -> float:
    acc = 0.0
    for c in counts:
        p = c / total
        acc += p * p
    return 1.0 - acc


def _entropy(counts, total: int) -> float:
    h = 0.0
    for c in counts:
        if c > 0:
            p = c / total
            h -= p * math.log2(p)
    return h


def split_score(parent_counts, branch_counts, criterion: SplitCriterion) -> float:
    """Score of a candidate split given per-branch class counts."""
    total = sum(parent_counts)
    if criterion is SplitCriterion.GINI:
        dec = _gini(parent_counts, total)
        for bc in branch_counts:
            n = sum(bc)
            dec -= (n / total) * _gini(bc, n)
        return dec
    if criterion is SplitCriterion.INFO_GAIN or criterion is SplitCriterion.GAIN_RATIO:
        gain = _entropy(parent_counts, total)
        split_info = 0.0
        for bc in branch_counts:
            n = sum(bc)
            w = n / total
            gain -= w * _entropy(bc, n)
            if w > 0:
                split_info -= w * math.log2(w)
        if criterion is SplitCriterion.INFO_GAIN:
            return gain
        return gain / split_info if split_info > 0 else 0.0
    if criterion is SplitCriterion.CHI_SQUARE:
        chi2 = 0.0
        for j, col_total in enumerate(parent_counts):
            if col_total == 0:
                continue
            for bc in branch_counts:
                n = sum(bc)
                expected = n * col_total / total
                if expected > 0:
                    d = bc[j] - expected
                    chi2 += d * d / expected
        return chi2
    raise InvalidInputError(f"unknown criterion {criterion!r}")


# ---------------------------------------------------------------------------
# Split search

def _is_categorical(values) -> bool:
    for v in values:
        if v is None:
            continue
        return isinstance(v, (bool, str))
    return False


def best_split(
    columns: dict[str, list],
    labels: list[GlycemicClass],
    criterion: SplitCriterion,
) -> SplitCandidate | None:
    """Exhaustive scan over every attribute and candidate cut.

    Numeric cuts are midpoints between consecutive distinct sorted values;
    categorical cuts are all binary partitions of the observed categories,
    canonicalized so the left side contains the first category. Missing
    values are excluded from scoring. Ties break deterministically by
    (attribute name, lower threshold / partition key). Returns None when no
    candidate improves the criterion.
    """
    n = len(labels)
    if n < 2:
        return None
    parent_counts = [0] * len(CLASS_ORDER)
    for y in labels:
        parent_counts[y.value] += 1
    if max(parent_counts) == n:  # uniform labels
        return None

    best: SplitCandidate | None = None

    def consider(cand: SplitCandidate):
        nonlocal best
        if cand.impurity_decrease <= SCORE_EPS:
            return
        if (
            best is None
            or cand.impurity_decrease > best.impurity_decrease
            or (
                cand.impurity_decrease == best.impurity_decrease
                and cand.tie_key() < best.tie_key()
            )
        ):
            best = cand

    for attr in sorted(columns):
        values = columns[attr]
        observed = [(v, labels[i]) for i, v in enumerate(values) if v is not None]
        if len(observed) < 2:
            continue
        obs_counts = [0] * len(CLASS_ORDER)
        for _, y in observed:
            obs_counts[y.value] += 1

        if _is_categorical(values):
            cats = sorted({v for v, _ in observed}, key=str)
            if len(cats) < 2:
                continue
            cat_counts = {
                c: [0] * len(CLASS_ORDER) for c in cats
            }
            for v, y in observed:
                cat_counts[v][y.value] += 1
            head, rest = cats[0], cats[1:]
            for mask in range(1 << len(rest)):
                left = [head] + [rest[i] for i in range(len(rest)) if mask >> i & 1]
                right = [c for c in cats if c not in left]
                if not right:
                    continue
                lc = [0] * len(CLASS_ORDER)
                for c in left:
                    for j in range(len(CLASS_ORDER)):
                        lc[j] += cat_counts[c][j]
                rc = [obs_counts[j] - lc[j] for j in range(len(CLASS_ORDER))]
                score = split_score(obs_counts, (lc, rc), criterion)
                consider(
                    SplitCandidate(
                        attribute=attr,
                        impurity_decrease=score,
                        branch_counts=(tuple(lc), tuple(rc)),
                        partition=(tuple(left), tuple(right)),
                    )
                )
        else:
            observed.sort(key=lambda p: p[0])
            left = [0] * len(CLASS_ORDER)
            for i in range(len(observed) - 1):
                v, y = observed[i]
                left[y.value] += 1
                nxt = observed[i + 1][0]
                if nxt == v:
                    continue
                threshold = (v + nxt) / 2.0
                rc = [obs_counts[j] - left[j] for j in range(len(CLASS_ORDER))]
                score = split_score(obs_counts, (left, rc), criterion)
                consider(
                    SplitCandidate(
                        attribute=attr,
                        impurity_decrease=score,
                        branch_counts=(tuple(left), tuple(rc)),
                        threshold=threshold,
                    )
                )
    return best


# ---------------------------------------------------------------------------
# Tree training

@dataclass
class TrainingReport:
    """Per-node split log plus aggregate feature importances."""

    criterion: str
    n_train: int
    node_log: list[dict] = field(default_factory=list)
    feature_importances: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "n_train": self.n_train,
            "nodes": self.node_log,
            "feature_importances": {
                k: self.feature_importances[k] for k in sorted(self.feature_importances)
            },
        }


def train_tree_with_report(
    train: CohortDataset,
    hyper: TrainHyperparams,
    features: list[str] | None = None,
) -> tuple[DecisionTree, TrainingReport]:
    """Greedy recursive partitioning; returns the learned tree and its log.

    Records with a missing value at a split follow the majority branch (and
    that branch becomes the node's default child). min_impurity_decrease
    gates the size-weighted score (n_node / n_train) * decrease.
    """
    if len(train) == 0:
        raise EmptyDatasetError("cannot train on an empty dataset")
    for r in train.records:
        if r.label is None:
            raise UnlabeledRecordError(r.id)
    if features is None:
        features = [f.name for f in train.schema]

    labels = [r.label for r in train.records]
    columns = {name: train.column(name) for name in features}
    n_total = len(labels)
    report = TrainingReport(criterion=hyper.criterion.value, n_train=n_total)

    nodes: dict[str, TreeNode] = {}
    counter = [0]

    def next_id() -> str:
        nid = f"n{counter[0]}"
        counter[0] += 1
        return nid

    def make_leaf(nid: str, counts: list[int], reason: str) -> str:
        total = sum(counts)
        dist = tuple(c / total for c in counts)
        nodes[nid] = TreeNode(id=nid, kind="leaf", provenance="ml", distribution=dist)
        report.node_log.append({"node": nid, "kind": "leaf", "n": total, "stop": reason})
        return nid

    def grow(indices: list[int], depth: int) -> str:
        nid = next_id()
        counts = [0] * len(CLASS_ORDER)
        for i in indices:
            counts[labels[i].value] += 1
        total = len(indices)

        if max(counts) == total:
            return make_leaf(nid, counts, "pure")
        if depth >= hyper.max_depth:
            return make_leaf(nid, counts, "max_depth")
        if total < 2 or total < 2 * hyper.min_leaf:
            return make_leaf(nid, counts, "min_records")

        sub_columns = {a: [columns[a][i] for i in indices] for a in columns}
        sub_labels = [labels[i] for i in indices]
        cand = best_split(sub_columns, sub_labels, hyper.criterion)
        if cand is None:
            return make_leaf(nid, counts, "no_split")
        weighted = (total / n_total) * cand.impurity_decrease
        if hyper.min_impurity_decrease > 0 and weighted < hyper.min_impurity_decrease:
            return make_leaf(nid, counts, "min_impurity_decrease")

        # partition records; missing values follow the majority branch
        if cand.threshold is not None:
            groups: list[list[int]] = [[], []]
            for i in indices:
                v = columns[cand.attribute][i]
                if v is None:
                    continue
                groups[0 if v <= cand.threshold else 1].append(i)
            predicates = [
                [Predicate("le", cand.threshold)],
                [Predicate("gt", cand.threshold)],
            ]
        else:
            left_set = set(cand.partition[0])
            groups = [[], []]
            for i in indices:
                v = columns[cand.attribute][i]
                if v is None:
                    continue
                groups[0 if v in left_set else 1].append(i)
            predicates = [
                [Predicate("eq", v) for v in cand.partition[0]],
                [Predicate("eq", v) for v in cand.partition[1]],
            ]
        majority = 0 if len(groups[0]) >= len(groups[1]) else 1
        missing = [i for i in indices if columns[cand.attribute][i] is None]
        groups[majority].extend(missing)

        if any(len(g) < hyper.min_leaf for g in groups):
            return make_leaf(nid, counts, "min_leaf")

        report.node_log.append(
            {
                "node": nid,
                "kind": "internal",
                "n": total,
                "attribute": cand.attribute,
                "threshold": cand.threshold,
                "partition": [list(s) for s in cand.partition] if cand.partition else None,
                "score": cand.impurity_decrease,
                "weighted_score": weighted,
            }
        )
        report.feature_importances[cand.attribute] = (
            report.feature_importances.get(cand.attribute, 0.0) + weighted
        )

        child_ids = [grow(g, depth + 1) for g in groups]
        branches = tuple(
            Branch(pred, child_ids[side])
            for side in (0, 1)
            for pred in predicates[side]
        )
        nodes[nid] = TreeNode(
            id=nid,
            kind="internal",
            provenance="ml",
            attribute=cand.attribute,
            branches=branches,
            default_child=child_ids[majority],
        )
        return nid

    root = grow(list(range(n_total)), 0)
    tree = DecisionTree(
        root=root,
        nodes=nodes,
        attributes={f.name: f for f in train.schema},
        model_version="1",
    )
    _check_structure(tree)
    return tree, report


def train_tree(
    train: CohortDataset,
    hyper: TrainHyperparams,
    features: list[str] | None = None,
) -> DecisionTree:
    tree, _ = train_tree_with_report(train, hyper, features)
    return tree


def predict_proba(tree: DecisionTree, record) -> tuple[float, float, float, float]:
    """Leaf distribution at the end of the classification path; sums to 1."""
    from .knowledge import classify

    _, path = classify(tree, record)
    return path.distribution


# ---------------------------------------------------------------------------
# Recursive feature elimination

def rfe_select(
    train: CohortDataset,
    k: int,
    hyper: TrainHyperparams,
) -> list[str]:
    """Iteratively drop the feature contributing least impurity decrease
    until k remain; survivors are returned in schema order."""
    all_features = [f.name for f in train.schema]
    if not 1 <= k <= len(all_features):
        raise InvalidKError(f"k must be in [1, {len(all_features)}], got {k}")
    current = list(all_features)
    while len(current) > k:
        _, report = train_tree_with_report(train, hyper, features=current)
        imp = report.feature_importances
        # ties drop the later schema column, keeping earlier ones longer
        drop = min(current, key=lambda f: (imp.get(f, 0.0), -all_features.index(f)))
        current.remove(drop)
    return [f for f in all_features if f in current]


# ---------------------------------------------------------------------------
# Algorithm ranking

@dataclass(frozen=True)
class RankScore:
    name: str
    accuracy: float
    rule_count: int
    attribute_count: int
    rank: float


def rank_value(accuracy: float, rule_count: int, attribute_count: int) -> float:
    """(accuracy + 1/rules + 1/attributes) / 3."""
    if not 0.0 <= accuracy <= 1.0:
        raise InvalidInputError(f"accuracy {accuracy} outside [0, 1]")
    if rule_count < 1 or attribute_count < 1:
        raise InvalidInputError("rule and attribute counts must be >= 1")
    return (accuracy + 1.0 / rule_count + 1.0 / attribute_count) / 3.0


def rank_algorithms(results) -> list[RankScore]:
    """Score and sort (name, accuracy, rule_count, attribute_count) entries,
    best first; equal ranks order by name."""
    scored = []
    for name, accuracy, rule_count, attribute_count in results:
        scored.append(
            RankScore(
                name=name,
                accuracy=accuracy,
                rule_count=rule_count,
                attribute_count=attribute_count,
                rank=rank_value(accuracy, rule_count, attribute_count),
            )
        )
    scored.sort(key=lambda s: (-s.rank, s.name))
    return scored
