"""Hybridization of the expert tree (CKM) and the learned tree (PM):
probabilistic score blending and structural path grafting into the merged
R-CKM, plus coverage accounting.

merge_models never modifies or removes existing host predicates; it only
appends branches for uncovered value regions and attaches dedicated
missing-value routes. Grafted nodes carry provenance "grafted", which also
makes repeated merging a no-op.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cohort import CLASS_ORDER, CohortDataset, GlycemicClass
from .errors import IncompatibleSchemasError
from .induction import predict_proba
from .knowledge import (
    Branch,
    DecisionTree,
    Interval,
    MISSING,
    NEG_INF,
    POS_INF,
    Predicate,
    TreeNode,
    _check_structure,
    argmax_class,
    classify,
    predicate_interval,
    uncovered_regions,
)

FULL_LINE = Interval(NEG_INF, POS_INF, True, True)


@dataclass(frozen=True)
class GraftEntry:
    host_node: str
    kind: str  # "gap" | "missing"
    attribute: str
    region: str  # rendered region, category value, or "missing"
    pm_source: str  # PM node the grafted subtree was copied from
    grafted_root: str

    def to_dict(self) -> dict:
        return {
            "host_node": self.host_node,
            "kind": self.kind,
            "attribute": self.attribute,
            "region": self.region,
            "pm_source": self.pm_source,
            "grafted_root": self.grafted_root,
        }


@dataclass(frozen=True)
class HybridModel:
    ckm: DecisionTree
    pm: DecisionTree
    rckm: DecisionTree
    alpha: float
    graft_log: tuple[GraftEntry, ...]

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")


def build_hybrid(ckm: DecisionTree, pm: DecisionTree, alpha: float = 0.5) -> HybridModel:
    rckm, graft_log = merge_models(ckm, pm)
    return HybridModel(ckm=ckm, pm=pm, rckm=rckm, alpha=alpha, graft_log=tuple(graft_log))


# ---------------------------------------------------------------------------
# Score blending

def blend_predict(
    model: HybridModel, record, alpha: float | None = None
) -> tuple[GlycemicClass, tuple[float, float, float, float]]:
    """alpha * onehot(CKM class) + (1 - alpha) * PM leaf distribution.

    The output is a convex combination summing to 1; argmax ties break
    toward severity.
    """
    a = model.alpha if alpha is None else alpha
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {a}")
    ckm_class, _ = classify(model.ckm, record)
    pm_dist = predict_proba(model.pm, record)
    dist = tuple(
        a * (1.0 if i == ckm_class.value else 0.0) + (1.0 - a) * pm_dist[i]
        for i in range(len(CLASS_ORDER))
    )
    return argmax_class(dist), dist


# ---------------------------------------------------------------------------
# Structural merge

def _check_attribute_compat(ckm: DecisionTree, pm: DecisionTree) -> dict:
    merged = dict(ckm.attributes)
    for name, attr in pm.attributes.items():
        if name in merged:
            ours = merged[name]
            if ours.kind != attr.kind or (
                ours.unit is not None and attr.unit is not None and ours.unit != attr.unit
            ):
                raise IncompatibleSchemasError(
                    f"attribute {name!r}: {ours.kind}/{ours.unit} vs {attr.kind}/{attr.unit}"
                )
        else:
            merged[name] = attr
    return merged


def _interval_predicate(iv: Interval) -> Predicate:
    # Closed forms are safe: grafted branches are appended after the host's,
    # so boundary values keep matching their original branch first.
    if iv.lo == NEG_INF:
        return Predicate("le", iv.hi)
    if iv.hi == POS_INF:
        return Predicate("gt", iv.lo)
    return Predicate("in", (iv.lo, iv.hi))


def _select_pm_subtree(pm: DecisionTree, constraints: dict) -> str:
    """Descend the PM while host-path constraints fully determine each test;
    stop (taking the subtree whole) at the first undetermined test."""
    nid = pm.root
    while True:
        node = pm.nodes[nid]
        if node.kind == "leaf":
            return nid
        c = constraints.get(node.attribute)
        if c is None or c is MISSING:
            return nid
        followed = None
        for b in node.branches:
            if isinstance(c, Interval):
                if b.predicate.op == "eq":
                    continue
                if predicate_interval(b.predicate).contains(c):
                    followed = b.child
                    break
            elif isinstance(c, frozenset):
                if b.predicate.op == "eq" and len(c) == 1 and b.predicate.value in c:
                    followed = b.child
                    break
        if followed is None:
            return nid
        nid = followed


def _copy_subtree(
    pm: DecisionTree, src_root: str, existing_ids: set[str], counter: list[int]
) -> tuple[str, dict[str, TreeNode]]:
    """Deep-copy a PM subtree under fresh ids with provenance 'grafted'."""
    mapping: dict[str, str] = {}
    order: list[str] = []
    stack = [src_root]
    while stack:
        old = stack.pop()
        if old in mapping:
            continue
        while True:
            nid = f"g{counter[0]}"
            counter[0] += 1
            if nid not in existing_ids:
                break
        mapping[old] = nid
        existing_ids.add(nid)
        order.append(old)
        node = pm.nodes[old]
        if node.kind == "internal":
            stack.extend(reversed(node.children()))
    new_nodes: dict[str, TreeNode] = {}
    for old in order:
        node = pm.nodes[old]
        if node.kind == "leaf":
            new_nodes[mapping[old]] = TreeNode(
                id=mapping[old],
                kind="leaf",
                provenance="grafted",
                distribution=node.distribution,
            )
        else:
            new_nodes[mapping[old]] = TreeNode(
                id=mapping[old],
                kind="internal",
                provenance="grafted",
                attribute=node.attribute,
                branches=tuple(
                    Branch(b.predicate, mapping[b.child]) for b in node.branches
                ),
                default_child=mapping[node.default_child],
            )
    return mapping[src_root], new_nodes


def _constrain(constraints: dict, attribute: str, predicate: Predicate, kind: str) -> dict:
    out = dict(constraints)
    if kind == "numeric" and predicate.op != "eq":
        base = constraints.get(attribute, FULL_LINE)
        if not isinstance(base, Interval):
            base = FULL_LINE
        out[attribute] = base.intersect(predicate_interval(predicate))
    elif predicate.op == "eq":
        base = constraints.get(attribute)
        vals = frozenset([predicate.value])
        if isinstance(base, frozenset):
            vals = base & vals
        out[attribute] = vals
    return out


def merge_models(
    ckm: DecisionTree, pm: DecisionTree
) -> tuple[DecisionTree, list[GraftEntry]]:
    """Graft PM subtrees onto the CKM's uncovered regions and missing routes.

    At every non-grafted internal node: value regions with no outgoing branch
    gain an appended branch into a PM subtree selected under the host path's
    constraints, and nodes without a dedicated missing-value route gain one.
    Existing nodes, predicates, and branch order are preserved, so behavior
    on already-covered inputs is unchanged.
    """
    attributes = _check_attribute_compat(ckm, pm)
    nodes: dict[str, TreeNode] = dict(ckm.nodes)
    existing_ids = set(nodes)
    counter = [0]
    graft_log: list[GraftEntry] = []

    def walk(nid: str, constraints: dict) -> None:
        node = ckm.nodes[nid]
        if node.kind != "internal" or node.provenance == "grafted":
            return
        attr_info = ckm.attributes.get(node.attribute)
        new_branches: list[Branch] = []
        new_default = node.default_child

        if attr_info is not None and attr_info.kind == "numeric":
            covered = [
                predicate_interval(b.predicate)
                for b in node.branches
                if b.predicate.op != "eq"
            ]
            for gap in uncovered_regions(covered):
                sub_constraints = dict(constraints)
                sub_constraints[node.attribute] = gap
                src = _select_pm_subtree(pm, sub_constraints)
                new_root, new_nodes = _copy_subtree(pm, src, existing_ids, counter)
                nodes.update(new_nodes)
                new_branches.append(Branch(_interval_predicate(gap), new_root))
                graft_log.append(
                    GraftEntry(
                        host_node=nid,
                        kind="gap",
                        attribute=node.attribute,
                        region=gap.render(),
                        pm_source=src,
                        grafted_root=new_root,
                    )
                )
        elif attr_info is not None and attr_info.values is not None:
            routed = {b.predicate.value for b in node.branches if b.predicate.op == "eq"}
            for value in attr_info.values:
                if value in routed:
                    continue
                sub_constraints = dict(constraints)
                sub_constraints[node.attribute] = frozenset([value])
                src = _select_pm_subtree(pm, sub_constraints)
                new_root, new_nodes = _copy_subtree(pm, src, existing_ids, counter)
                nodes.update(new_nodes)
                new_branches.append(Branch(Predicate("eq", value), new_root))
                graft_log.append(
                    GraftEntry(
                        host_node=nid,
                        kind="gap",
                        attribute=node.attribute,
                        region=str(value),
                        pm_source=src,
                        grafted_root=new_root,
                    )
                )

        if not node.has_missing_route():
            sub_constraints = dict(constraints)
            sub_constraints[node.attribute] = MISSING
            src = _select_pm_subtree(pm, sub_constraints)
            new_root, new_nodes = _copy_subtree(pm, src, existing_ids, counter)
            nodes.update(new_nodes)
            new_default = new_root
            graft_log.append(
                GraftEntry(
                    host_node=nid,
                    kind="missing",
                    attribute=node.attribute,
                    region="missing",
                    pm_source=src,
                    grafted_root=new_root,
                )
            )

        if new_branches or new_default != node.default_child:
            nodes[nid] = TreeNode(
                id=nid,
                kind="internal",
                provenance=node.provenance,
                attribute=node.attribute,
                branches=node.branches + tuple(new_branches),
                default_child=new_default,
            )

        kind = attr_info.kind if attr_info is not None else "numeric"
        for b in node.branches:
            walk(b.child, _constrain(constraints, node.attribute, b.predicate, kind))
        if node.has_missing_route():
            sub = dict(constraints)
            sub[node.attribute] = MISSING
            walk(node.default_child, sub)

    walk(ckm.root, {})

    rckm = DecisionTree(
        root=ckm.root,
        nodes=nodes,
        attributes=attributes,
        model_version=ckm.model_version,
        annotations=ckm.annotations,
    )
    _check_structure(rckm)
    return rckm, graft_log


# ---------------------------------------------------------------------------
# Coverage

@dataclass
class CoverageReport:
    n: int
    covered: int
    coverage: float | None  # None for an empty dataset
    leaf_hits: dict[str, int] = field(default_factory=dict)
    fallback_hits: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "covered": self.covered,
            "coverage": self.coverage,
            "leaf_hits": {k: self.leaf_hits[k] for k in sorted(self.leaf_hits)},
            "fallback_hits": {k: self.fallback_hits[k] for k in sorted(self.fallback_hits)},
        }


def coverage_report(tree: DecisionTree, dataset: CohortDataset) -> CoverageReport:
    """Fraction of records classified without any default/fallback hop."""
    report = CoverageReport(n=len(dataset), covered=0, coverage=None)
    for record in dataset.records:
        _, path = classify(tree, record)
        report.leaf_hits[path.leaf_id] = report.leaf_hits.get(path.leaf_id, 0) + 1
        if path.took_fallback:
            for step in path.steps:
                if step.fallback:
                    report.fallback_hits[step.node_id] = (
                        report.fallback_hits.get(step.node_id, 0) + 1
                    )
        else:
            report.covered += 1
    if report.n > 0:
        report.coverage = report.covered / report.n
    return report
