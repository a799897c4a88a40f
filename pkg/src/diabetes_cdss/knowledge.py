"""Decision-tree knowledge representation shared by the expert model, the
learned model, and the merged hybrid, plus deterministic classification with
full decision-path traces.

Trees are immutable after construction/parse; classification is read-only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .cohort import CLASS_ORDER, FEATURE_BY_NAME, Feature, GlycemicClass, PatientRecord
from .errors import (
    CycleDetectedError,
    DanglingBranchError,
    SchemaViolationError,
    UnknownAttributeError,
)

MODEL_VERSION = "1"

#: Sentinel predicate term for "attribute is missing" in rules and regions.
MISSING = "missing"

DIST_TOL = 1e-9


def argmax_class(distribution) -> GlycemicClass:
    """Argmax over the 4-class distribution; ties break toward severity."""
    best = 0
    for i in range(1, len(CLASS_ORDER)):
        if distribution[i] > distribution[best]:
            best = i
    return GlycemicClass(best)


@dataclass(frozen=True)
class Predicate:
    """A test over a single attribute value.

    Ops: "le" (<= t), "gt" (> t), "in" ([a, b], closed), "eq" (categorical
    equality). Branch predicates are evaluated in declaration order with
    first-match-wins, so overlapping regions resolve deterministically.
    """

    op: str
    value: object

    def __post_init__(self):
        if self.op not in ("le", "gt", "in", "eq"):
            raise SchemaViolationError(f"unknown predicate op {self.op!r}")
        if self.op == "in":
            lo, hi = self.value  # type: ignore[misc]
            if not lo <= hi:
                raise SchemaViolationError(f"empty interval [{lo}, {hi}]")

    def matches(self, v) -> bool:
        if v is None:
            return False
        if self.op == "le":
            return v <= self.value
        if self.op == "gt":
            return v > self.value
        if self.op == "in":
            lo, hi = self.value
            return lo <= v <= hi
        return v == self.value

    def render(self, attribute: str) -> str:
        if self.op == "le":
            return f"{attribute} <= {self.value}"
        if self.op == "gt":
            return f"{attribute} > {self.value}"
        if self.op == "in":
            lo, hi = self.value
            return f"{attribute} in [{lo}, {hi}]"
        v = self.value
        if isinstance(v, bool):
            v = "true" if v else "false"
        return f"{attribute} = {v}"

    def to_dict(self, attribute: str) -> dict:
        if self.op == "in":
            lo, hi = self.value
            return {"attr": attribute, "op": "in", "value": [lo, hi]}
        return {"attr": attribute, "op": self.op, "value": self.value}

    @classmethod
    def from_dict(cls, doc: dict) -> "Predicate":
        op = doc.get("op")
        value = doc.get("value")
        if op == "in":
            if not isinstance(value, (list, tuple)) or len(value) != 2:
                raise SchemaViolationError(f"'in' predicate needs [lo, hi], got {value!r}")
            value = (float(value[0]), float(value[1]))
        elif op in ("le", "gt"):
            value = float(value)
        return cls(op=op, value=value)


@dataclass(frozen=True)
class Branch:
    predicate: Predicate
    child: str


@dataclass(frozen=True)
class TreeNode:
    """Internal test node or leaf. Internal nodes route missing (or uncovered)
    values through default_child; a default_child that is not also a branch
    target is a dedicated missing-value route."""

    id: str
    kind: str  # "internal" | "leaf"
    provenance: str = "expert"  # "expert" | "ml" | "grafted"
    attribute: str | None = None
    branches: tuple[Branch, ...] = ()
    default_child: str | None = None
    distribution: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if self.kind == "leaf":
            if self.distribution is None or len(self.distribution) != len(CLASS_ORDER):
                raise SchemaViolationError(f"leaf {self.id!r} needs a 4-class distribution")
            total = math.fsum(self.distribution)
            if abs(total - 1.0) > DIST_TOL or any(p < 0 for p in self.distribution):
                raise SchemaViolationError(
                    f"leaf {self.id!r} distribution {self.distribution} does not sum to 1"
                )
        elif self.kind == "internal":
            if self.attribute is None or len(self.branches) < 2:
                raise SchemaViolationError(f"internal node {self.id!r} needs >= 2 branches")
            if self.default_child is None:
                raise SchemaViolationError(f"internal node {self.id!r} has no default child")
        else:
            raise SchemaViolationError(f"node {self.id!r}: unknown kind {self.kind!r}")

    @property
    def decided_class(self) -> GlycemicClass:
        if self.kind != "leaf":
            raise ValueError(f"node {self.id!r} is not a leaf")
        return argmax_class(self.distribution)

    def children(self) -> list[str]:
        """Distinct child ids in branch order; a dedicated default child last."""
        out: list[str] = []
        for b in self.branches:
            if b.child not in out:
                out.append(b.child)
        if self.default_child is not None and self.default_child not in out:
            out.append(self.default_child)
        return out

    def has_missing_route(self) -> bool:
        """True when the default child is a dedicated missing-value subtree."""
        return self.default_child not in {b.child for b in self.branches}


@dataclass(frozen=True)
class DecisionTree:
    root: str
    nodes: dict[str, TreeNode]
    attributes: dict[str, Feature]
    model_version: str = MODEL_VERSION
    annotations: tuple[str, ...] = ()

    def node(self, node_id: str) -> TreeNode:
        return self.nodes[node_id]

    def leaves(self) -> list[TreeNode]:
        """Leaves reachable from the root, in rule (DFS) order."""
        out = []
        stack = [self.root]
        while stack:
            n = self.nodes[stack.pop()]
            if n.kind == "leaf":
                out.append(n)
            else:
                stack.extend(reversed(n.children()))
        return out

    def leaf_count(self) -> int:
        return len(self.leaves())

    def attributes_used(self) -> set[str]:
        return {n.attribute for n in self.nodes.values() if n.kind == "internal"}


# ---------------------------------------------------------------------------
# Structural validation & (de)serialization

def _check_structure(tree: DecisionTree) -> None:
    if tree.root not in tree.nodes:
        raise DanglingBranchError("<root>", tree.root)
    parent: dict[str, str] = {}
    for nid, node in tree.nodes.items():
        if node.id != nid:
            raise SchemaViolationError(f"node key {nid!r} disagrees with node id {node.id!r}")
        if node.kind != "internal":
            continue
        if node.attribute not in tree.attributes:
            raise UnknownAttributeError(nid, node.attribute)
        for child in node.children():
            if child not in tree.nodes:
                raise DanglingBranchError(nid, child)
            if child in parent and parent[child] != nid:
                raise SchemaViolationError(
                    f"node {child!r} has two parents: {parent[child]!r} and {nid!r}"
                )
            parent[child] = nid
    if tree.root in parent:
        raise CycleDetectedError(f"root {tree.root!r} appears as a child")
    # detect cycles over the whole node set, including orphan components
    WHITE, GREY, BLACK = 0, 1, 2
    color = {nid: WHITE for nid in tree.nodes}
    for start in tree.nodes:
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(start, 0)]
        color[start] = GREY
        while stack:
            nid, i = stack.pop()
            kids = tree.nodes[nid].children() if tree.nodes[nid].kind == "internal" else []
            if i < len(kids):
                stack.append((nid, i + 1))
                kid = kids[i]
                if color[kid] == GREY:
                    raise CycleDetectedError(f"cycle through node {kid!r}")
                if color[kid] == WHITE:
                    color[kid] = GREY
                    stack.append((kid, 0))
            else:
                color[nid] = BLACK


def tree_to_dict(tree: DecisionTree) -> dict:
    nodes = {}
    for nid in sorted(tree.nodes):
        n = tree.nodes[nid]
        if n.kind == "leaf":
            nodes[nid] = {
                "kind": "leaf",
                "provenance": n.provenance,
                "distribution": list(n.distribution),
            }
        else:
            nodes[nid] = {
                "kind": "internal",
                "provenance": n.provenance,
                "attribute": n.attribute,
                "branches": [
                    {"predicate": b.predicate.to_dict(n.attribute), "child": b.child}
                    for b in n.branches
                ],
                "default": n.default_child,
            }
    attrs = {}
    for name in sorted(tree.attributes):
        a = tree.attributes[name]
        entry: dict = {"kind": a.kind}
        if a.unit is not None:
            entry["unit"] = a.unit
        if a.values is not None:
            entry["values"] = list(a.values)
        attrs[name] = entry
    return {
        "model_version": tree.model_version,
        "root": tree.root,
        "attributes": attrs,
        "annotations": list(tree.annotations),
        "nodes": nodes,
    }


def _attribute_from_dict(name: str, doc: dict) -> Feature:
    values = doc.get("values")
    return Feature(
        name=name,
        kind=doc.get("kind", "numeric"),
        unit=doc.get("unit"),
        values=tuple(values) if values is not None else None,
    )


def parse_knowledge_model(doc: dict | str) -> DecisionTree:
    """Build a validated DecisionTree from its JSON document (or parsed dict)."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as e:
            raise SchemaViolationError(f"not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise SchemaViolationError("model document must be a JSON object")
    for key in ("model_version", "root", "nodes", "attributes"):
        if key not in doc:
            raise SchemaViolationError(f"missing required key {key!r}")

    attributes = {
        name: _attribute_from_dict(name, spec)
        for name, spec in doc["attributes"].items()
    }
    nodes: dict[str, TreeNode] = {}
    for nid, nd in doc["nodes"].items():
        kind = nd.get("kind")
        if kind == "leaf":
            dist = nd.get("distribution")
            if not isinstance(dist, list):
                raise SchemaViolationError(f"leaf {nid!r} missing distribution")
            nodes[nid] = TreeNode(
                id=nid,
                kind="leaf",
                provenance=nd.get("provenance", "expert"),
                distribution=tuple(float(p) for p in dist),
            )
        elif kind == "internal":
            branches = tuple(
                Branch(predicate=Predicate.from_dict(b["predicate"]), child=b["child"])
                for b in nd.get("branches", ())
            )
            nodes[nid] = TreeNode(
                id=nid,
                kind="internal",
                provenance=nd.get("provenance", "expert"),
                attribute=nd.get("attribute"),
                branches=branches,
                default_child=nd.get("default"),
            )
        else:
            raise SchemaViolationError(f"node {nid!r}: unknown kind {kind!r}")

    tree = DecisionTree(
        root=doc["root"],
        nodes=nodes,
        attributes=attributes,
        model_version=str(doc["model_version"]),
        annotations=tuple(doc.get("annotations", ())),
    )
    _check_structure(tree)
    return tree


def tree_to_json(tree: DecisionTree) -> str:
    """Canonical serialization: sorted keys, newline-terminated, floats via
    shortest round-trip decimal form (bit-exact on reparse)."""
    return json.dumps(tree_to_dict(tree), sort_keys=True, indent=1) + "\n"


# ---------------------------------------------------------------------------
# Reference expert model

def build_reference_ckm() -> DecisionTree:
    """The expert-authored staging tree.

    Flow: HbA1c <= 6.5 -> NoDiabetes; else FPG > 126 -> (BMI > 25 ->
    VerifiedDiabetes, else Prediabetes); else NoDiabetes. Non-branching
    clinical markers (history, activity, blood pressure, ...) ride along as
    annotations so traces can surface them.
    """
    one_hot = {
        c: tuple(1.0 if i == c.value else 0.0 for i in range(len(CLASS_ORDER)))
        for c in CLASS_ORDER
    }
    nodes = {
        "root": TreeNode(
            id="root",
            kind="internal",
            attribute="hba1c",
            branches=(
                Branch(Predicate("le", 6.5), "leaf_normal_a1c"),
                Branch(Predicate("gt", 6.5), "fpg_check"),
            ),
            default_child="leaf_normal_a1c",  # conservative: least severe subtree
        ),
        "fpg_check": TreeNode(
            id="fpg_check",
            kind="internal",
            attribute="fpg",
            branches=(
                Branch(Predicate("gt", 126.0), "bmi_check"),
                Branch(Predicate("le", 126.0), "leaf_normal_fpg"),
            ),
            default_child="leaf_normal_fpg",
        ),
        "bmi_check": TreeNode(
            id="bmi_check",
            kind="internal",
            attribute="bmi",
            branches=(
                Branch(Predicate("gt", 25.0), "leaf_diabetes"),
                Branch(Predicate("le", 25.0), "leaf_prediabetes"),
            ),
            default_child="leaf_prediabetes",
        ),
        "leaf_normal_a1c": TreeNode(
            id="leaf_normal_a1c", kind="leaf",
            distribution=one_hot[GlycemicClass.NO_DIABETES],
        ),
        "leaf_normal_fpg": TreeNode(
            id="leaf_normal_fpg", kind="leaf",
            distribution=one_hot[GlycemicClass.NO_DIABETES],
        ),
        "leaf_diabetes": TreeNode(
            id="leaf_diabetes", kind="leaf",
            distribution=one_hot[GlycemicClass.VERIFIED_DIABETES],
        ),
        "leaf_prediabetes": TreeNode(
            id="leaf_prediabetes", kind="leaf",
            distribution=one_hot[GlycemicClass.PREDIABETES],
        ),
    }
    attributes = {
        "hba1c": FEATURE_BY_NAME["hba1c"],
        "fpg": FEATURE_BY_NAME["fpg"],
        "bmi": FEATURE_BY_NAME["bmi"],
    }
    tree = DecisionTree(
        root="root",
        nodes=nodes,
        attributes=attributes,
        annotations=CLINICAL_MARKER_NAMES,
    )
    _check_structure(tree)
    return tree


# ---------------------------------------------------------------------------
# Classification

@dataclass(frozen=True)
class PathStep:
    node_id: str
    attribute: str | None  # None for the terminal leaf step
    description: str
    branch_taken: str
    observed: object
    fallback: bool = False


@dataclass(frozen=True)
class DecisionPath:
    steps: tuple[PathStep, ...]
    leaf_id: str
    decided_class: GlycemicClass
    distribution: tuple[float, float, float, float]

    @property
    def tests(self) -> tuple[PathStep, ...]:
        return tuple(s for s in self.steps if s.attribute is not None)

    @property
    def took_fallback(self) -> bool:
        return any(s.fallback for s in self.steps)


def _record_value(record, attribute: str):
    if isinstance(record, Mapping):
        return record.get(attribute)
    return record.value(attribute)


def classify(tree: DecisionTree, record) -> tuple[GlycemicClass, DecisionPath]:
    """Deterministic root-to-leaf descent.

    Missing values, and values no branch predicate covers, follow the node's
    default child; such steps are flagged as fallbacks in the path.
    """
    steps: list[PathStep] = []
    nid = tree.root
    guard = 0
    while True:
        guard += 1
        if guard > len(tree.nodes) + 1:
            raise SchemaViolationError("descent exceeded node count; tree is malformed")
        node = tree.nodes[nid]
        if node.kind == "leaf":
            steps.append(
                PathStep(
                    node_id=nid,
                    attribute=None,
                    description=f"class = {node.decided_class.slug}",
                    branch_taken="",
                    observed=None,
                )
            )
            path = DecisionPath(
                steps=tuple(steps),
                leaf_id=nid,
                decided_class=node.decided_class,
                distribution=node.distribution,
            )
            return node.decided_class, path
        value = _record_value(record, node.attribute)
        taken = None
        if value is not None:
            for b in node.branches:
                if b.predicate.matches(value):
                    taken = b
                    break
        if taken is not None:
            steps.append(
                PathStep(
                    node_id=nid,
                    attribute=node.attribute,
                    description=taken.predicate.render(node.attribute),
                    branch_taken=taken.predicate.render(node.attribute),
                    observed=value,
                )
            )
            nid = taken.child
        else:
            why = "missing value" if value is None else "no branch covers value"
            steps.append(
                PathStep(
                    node_id=nid,
                    attribute=node.attribute,
                    description=f"{node.attribute}: {why}; default branch",
                    branch_taken="default",
                    observed=value,
                    fallback=True,
                )
            )
            nid = node.default_child


# ---------------------------------------------------------------------------
# Rules

@dataclass(frozen=True)
class Rule:
    """Root-to-leaf conjunction. Terms are (attribute, Predicate) pairs, or
    (attribute, MISSING) for a dedicated missing-value route."""

    predicates: tuple[tuple[str, object], ...]
    consequent: GlycemicClass
    distribution: tuple[float, float, float, float]
    provenance: str
    leaf_id: str

    def render(self) -> str:
        if not self.predicates:
            cond = "always"
        else:
            cond = " AND ".join(
                f"{attr} is missing" if pred is MISSING else pred.render(attr)
                for attr, pred in self.predicates
            )
        return f"IF {cond} THEN {self.consequent.slug}"


def enumerate_rules(tree: DecisionTree) -> list[Rule]:
    """One rule per reachable leaf, in DFS branch order."""
    rules: list[Rule] = []

    def walk(nid: str, terms: tuple):
        node = tree.nodes[nid]
        if node.kind == "leaf":
            rules.append(
                Rule(
                    predicates=terms,
                    consequent=node.decided_class,
                    distribution=node.distribution,
                    provenance=node.provenance,
                    leaf_id=nid,
                )
            )
            return
        seen = set()
        for b in node.branches:
            if b.child in seen:
                continue
            seen.add(b.child)
            walk(b.child, terms + ((node.attribute, b.predicate),))
        if node.default_child not in seen:
            walk(node.default_child, terms + ((node.attribute, MISSING),))

    walk(tree.root, ())
    return rules


# ---------------------------------------------------------------------------
# Interval coverage analysis

NEG_INF = float("-inf")
POS_INF = float("inf")


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float
    lo_open: bool
    hi_open: bool

    def is_empty(self) -> bool:
        if self.lo > self.hi:
            return True
        return self.lo == self.hi and (self.lo_open or self.hi_open)

    def contains(self, other: "Interval") -> bool:
        lo_ok = self.lo < other.lo or (
            self.lo == other.lo and (not self.lo_open or other.lo_open)
        )
        hi_ok = self.hi > other.hi or (
            self.hi == other.hi and (not self.hi_open or other.hi_open)
        )
        return lo_ok and hi_ok

    def intersect(self, other: "Interval") -> "Interval":
        if self.lo > other.lo or (self.lo == other.lo and self.lo_open):
            lo, lo_open = self.lo, self.lo_open
        else:
            lo, lo_open = other.lo, other.lo_open
        if self.hi < other.hi or (self.hi == other.hi and self.hi_open):
            hi, hi_open = self.hi, self.hi_open
        else:
            hi, hi_open = other.hi, other.hi_open
        return Interval(lo, hi, lo_open, hi_open)

    def render(self) -> str:
        lo = "(" if self.lo_open or self.lo == NEG_INF else "["
        hi = ")" if self.hi_open or self.hi == POS_INF else "]"
        return f"{lo}{self.lo}, {self.hi}{hi}"


FULL_LINE = Interval(NEG_INF, POS_INF, True, True)


def predicate_interval(pred: Predicate) -> Interval:
    if pred.op == "le":
        return Interval(NEG_INF, float(pred.value), True, False)
    if pred.op == "gt":
        return Interval(float(pred.value), POS_INF, True, True)
    if pred.op == "in":
        lo, hi = pred.value
        return Interval(float(lo), float(hi), False, False)
    raise ValueError(f"predicate {pred.op!r} has no interval form")


def uncovered_regions(intervals: list[Interval]) -> list[Interval]:
    """Complement of a union of intervals within the whole real line."""
    live = [iv for iv in intervals if not iv.is_empty()]
    if not live:
        return [FULL_LINE]
    live.sort(key=lambda iv: (iv.lo, iv.lo_open))
    gaps: list[Interval] = []
    first = live[0]
    if first.lo > NEG_INF:
        gaps.append(Interval(NEG_INF, first.lo, True, not first.lo_open))
    cov_hi, cov_open = first.hi, first.hi_open
    for iv in live[1:]:
        starts_before = iv.lo < cov_hi or (iv.lo == cov_hi and not (iv.lo_open and cov_open))
        if starts_before:
            if iv.hi > cov_hi or (iv.hi == cov_hi and cov_open and not iv.hi_open):
                cov_hi, cov_open = iv.hi, iv.hi_open
        else:
            gaps.append(Interval(cov_hi, iv.lo, not cov_open, not iv.lo_open))
            cov_hi, cov_open = iv.hi, iv.hi_open
    if cov_hi < POS_INF:
        gaps.append(Interval(cov_hi, POS_INF, not cov_open, True))
    return [g for g in gaps if not g.is_empty()]


def node_value_gaps(tree: DecisionTree, node: TreeNode) -> list:
    """Uncovered value regions at an internal node.

    Numeric attributes yield Interval gaps; categorical attributes with a
    declared value set yield the list of unrouted category values.
    """
    attr = tree.attributes.get(node.attribute)
    if attr is None:
        return []
    if attr.kind == "numeric":
        ivs = []
        for b in node.branches:
            if b.predicate.op == "eq":
                continue
            ivs.append(predicate_interval(b.predicate))
        return uncovered_regions(ivs)
    if attr.values is None:
        return []
    covered = {b.predicate.value for b in node.branches if b.predicate.op == "eq"}
    return [v for v in attr.values if v not in covered]


@dataclass(frozen=True)
class Finding:
    kind: str  # "unreachable" | "gap" | "overlap" | "distribution"
    node_id: str
    detail: str


def validate_tree(tree: DecisionTree) -> list[Finding]:
    """Report unreachable nodes, numeric coverage gaps/overlaps, and
    non-normalized leaf distributions. Findings, not failures."""
    findings: list[Finding] = []

    reachable = set()
    stack = [tree.root]
    while stack:
        nid = stack.pop()
        if nid in reachable:
            continue
        reachable.add(nid)
        node = tree.nodes[nid]
        if node.kind == "internal":
            stack.extend(node.children())
    for nid in sorted(set(tree.nodes) - reachable):
        findings.append(Finding("unreachable", nid, "not reachable from root"))

    for nid in sorted(tree.nodes):
        node = tree.nodes[nid]
        if node.kind == "leaf":
            total = math.fsum(node.distribution)
            if abs(total - 1.0) > DIST_TOL:
                findings.append(
                    Finding("distribution", nid, f"distribution sums to {total!r}")
                )
            continue
        attr = tree.attributes.get(node.attribute)
        if attr is None or attr.kind != "numeric":
            gaps = node_value_gaps(tree, node)
            for v in gaps:
                findings.append(Finding("gap", nid, f"{node.attribute} = {v!r} unrouted"))
            continue
        ivs = [
            predicate_interval(b.predicate)
            for b in node.branches
            if b.predicate.op != "eq"
        ]
        for gap in uncovered_regions(ivs):
            findings.append(Finding("gap", nid, f"{node.attribute} {gap.render()}"))
        for i in range(len(ivs)):
            for j in range(i + 1, len(ivs)):
                inter = ivs[i].intersect(ivs[j])
                if not inter.is_empty():
                    findings.append(
                        Finding("overlap", nid, f"{node.attribute} {inter.render()}")
                    )
    return findings


# ---------------------------------------------------------------------------
# Clinical marker annotations

CLINICAL_MARKER_NAMES: tuple[str, ...] = (
    "family_history",
    "physical_activity",
    "hba1c",
    "fpg",
    "bmi",
    "blood_pressure",
)


def clinical_markers(record: PatientRecord, enabled: Iterable[str] = CLINICAL_MARKER_NAMES) -> list[str]:
    """Symptomatology markers attached to diagnoses (non-branching).

    Hypertension means sbp >= 140, dbp >= 90, or current antihypertensive
    medication. Markers whose inputs are missing are skipped.
    """
    out: list[str] = []
    enabled = set(enabled)
    if "family_history" in enabled and record.family_history is not None:
        out.append("Positive History" if record.family_history else "Negative History")
    if "physical_activity" in enabled and record.physical_activity is not None:
        out.append("Active" if record.physical_activity == "high" else "Inactive")
    if "hba1c" in enabled and record.hba1c is not None:
        out.append("Elevated HbA1c" if record.hba1c >= 6.5 else "Normal HbA1c")
    if "fpg" in enabled and record.fpg is not None:
        out.append("High Glucose" if record.fpg >= 126.0 else "Normal Glucose")
    if "bmi" in enabled and record.bmi is not None:
        out.append("Overweight" if record.bmi > 25.0 else "Normal Weight")
    if "blood_pressure" in enabled:
        sbp, dbp, med = record.sbp, record.dbp, record.htn_medication
        if sbp is not None or dbp is not None or med is not None:
            hyper = (
                (sbp is not None and sbp >= 140.0)
                or (dbp is not None and dbp >= 90.0)
                or med is True
            )
            out.append("High BP" if hyper else "Normal BP")
    return out
