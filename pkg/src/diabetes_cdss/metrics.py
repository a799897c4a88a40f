"""Evaluation: 4-class confusion matrices, per-class accuracy / sensitivity /
specificity via one-vs-rest reduction, Cohen's kappa, concordance, age-band
and feature-subset subgroup reports, plus plain-text table rendering.

Metrics with zero denominators are reported as None, never coerced to 0 or 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .cohort import CLASS_ORDER, CohortDataset, GlycemicClass
from .errors import (
    DegenerateMarginalsError,
    EmptyInputError,
    InvalidSubsetError,
    LengthMismatchError,
    OverlappingBandsError,
)
from .hybrid import HybridModel, blend_predict
from .knowledge import DecisionTree, classify

#: Age bands used by the subgroup report unless the caller overrides them.
DEFAULT_AGE_BANDS: tuple[tuple[float, float], ...] = ((20, 40), (41, 60), (61, 80), (81, 100))

_SHORT = {
    GlycemicClass.VERIFIED_DIABETES: "Verified Diabetics",
    GlycemicClass.PREDIABETES: "Prediabetes",
    GlycemicClass.AT_RISK: "At-Risk",
    GlycemicClass.NO_DIABETES: "Non Diabetics",
}


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are truth, columns are predictions, both in severity order."""

    counts: tuple[tuple[int, int, int, int], ...]

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    def row_sum(self, c: GlycemicClass) -> int:
        return sum(self.counts[c.value])

    def col_sum(self, c: GlycemicClass) -> int:
        return sum(row[c.value] for row in self.counts)

    @property
    def trace(self) -> int:
        return sum(self.counts[i][i] for i in range(len(CLASS_ORDER)))

    def accuracy(self) -> float:
        return self.trace / self.total

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.counts]

    @classmethod
    def from_lists(cls, rows) -> "ConfusionMatrix":
        k = len(CLASS_ORDER)
        if len(rows) != k or any(len(r) != k for r in rows):
            raise EmptyInputError(f"expected a {k}x{k} matrix")
        return cls(counts=tuple(tuple(int(v) for v in r) for r in rows))


def confusion_matrix(
    truth: list[GlycemicClass], predicted: list[GlycemicClass]
) -> ConfusionMatrix:
    if len(truth) != len(predicted):
        raise LengthMismatchError(len(truth), len(predicted))
    if not truth:
        raise EmptyInputError("no observations")
    k = len(CLASS_ORDER)
    counts = [[0] * k for _ in range(k)]
    for t, p in zip(truth, predicted):
        counts[t.value][p.value] += 1
    return ConfusionMatrix(counts=tuple(tuple(r) for r in counts))


@dataclass(frozen=True)
class ClassMetrics:
    glycemic_class: GlycemicClass
    tp: int
    fn: int
    fp: int
    tn: int
    accuracy: float | None
    sensitivity: float | None
    specificity: float | None

    def to_dict(self) -> dict:
        return {
            "class": self.glycemic_class.slug,
            "tp": self.tp,
            "fn": self.fn,
            "fp": self.fp,
            "tn": self.tn,
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
        }


def per_class_metrics(cm: ConfusionMatrix, cls: GlycemicClass) -> ClassMetrics:
    """One-vs-rest reduction of the 4x4 matrix for a single class."""
    if cm.total == 0:
        raise EmptyInputError("empty confusion matrix")
    tp = cm.counts[cls.value][cls.value]
    fn = cm.row_sum(cls) - tp
    fp = cm.col_sum(cls) - tp
    tn = cm.total - tp - fn - fp
    return ClassMetrics(
        glycemic_class=cls,
        tp=tp,
        fn=fn,
        fp=fp,
        tn=tn,
        accuracy=(tp + tn) / cm.total,
        sensitivity=tp / (tp + fn) if tp + fn > 0 else None,
        specificity=tn / (tn + fp) if tn + fp > 0 else None,
    )


@dataclass(frozen=True)
class AgreementReport:
    p_o: float
    p_e: float
    kappa: float
    concordance: float  # identical-diagnosis fraction (= p_o)

    def to_dict(self) -> dict:
        return {
            "p_o": self.p_o,
            "p_e": self.p_e,
            "kappa": self.kappa,
            "concordance": self.concordance,
        }


def cohens_kappa(cm: ConfusionMatrix) -> AgreementReport:
    """Chance-corrected agreement between the row and column raters."""
    total = cm.total
    if total == 0:
        raise EmptyInputError("empty confusion matrix")
    p_o = cm.trace / total
    p_e = sum(cm.row_sum(c) * cm.col_sum(c) for c in CLASS_ORDER) / (total * total)
    if p_e >= 1.0:
        raise DegenerateMarginalsError(f"chance agreement p_e = {p_e}")
    kappa = (p_o - p_e) / (1.0 - p_e)
    return AgreementReport(p_o=p_o, p_e=p_e, kappa=kappa, concordance=p_o)


def concordance_rate(system: list, expert: list) -> float:
    """Fraction of positions where both raters give the identical class."""
    if len(system) != len(expert):
        raise LengthMismatchError(len(system), len(expert))
    if not system:
        raise EmptyInputError("no observations")
    agree = sum(1 for s, e in zip(system, expert) if s == e)
    return agree / len(system)


# ---------------------------------------------------------------------------
# Model-level evaluation helpers

def predict_class(model, record) -> GlycemicClass:
    """Single-record prediction for either a plain tree or a hybrid model."""
    if isinstance(model, HybridModel):
        return blend_predict(model, record)[0]
    return classify(model, record)[0]


def predictions(model, dataset: CohortDataset) -> list[GlycemicClass]:
    return [predict_class(model, r) for r in dataset.records]


@dataclass(frozen=True)
class BandReport:
    lo: float
    hi: float
    n: int
    correct: int
    false: int

    def to_dict(self) -> dict:
        return {"band": [self.lo, self.hi], "n": self.n, "correct": self.correct,
                "false": self.false}


def subgroup_report(
    dataset: CohortDataset,
    model,
    age_bands: tuple[tuple[float, float], ...] = DEFAULT_AGE_BANDS,
) -> list[BandReport]:
    """Diagnostic accuracy per age band (bands inclusive on both ends)."""
    bands = [tuple(b) for b in age_bands]
    for i in range(len(bands)):
        for j in range(i + 1, len(bands)):
            (lo1, hi1), (lo2, hi2) = bands[i], bands[j]
            if lo1 <= hi2 and lo2 <= hi1:
                raise OverlappingBandsError(bands[i], bands[j])
    out = []
    for lo, hi in bands:
        n = correct = 0
        for r in dataset.records:
            if r.age is None or not lo <= r.age <= hi:
                continue
            if r.label is None:
                continue
            n += 1
            if predict_class(model, r) == r.label:
                correct += 1
        out.append(BandReport(lo=lo, hi=hi, n=n, correct=correct, false=n - correct))
    return out


def feature_set_comparison(
    model,
    dataset: CohortDataset,
    set_a: set[str],
    set_b: set[str],
) -> tuple[float, float]:
    """Label concordance with full features (set A) versus with everything
    outside set B masked as missing."""
    if not set(set_b) <= set(set_a):
        raise InvalidSubsetError(f"set B {sorted(set_b)} is not a subset of set A")
    labels = dataset.labels()
    preds_a = [predict_class(model, r.masked(set(set_a))) for r in dataset.records]
    preds_b = [predict_class(model, r.masked(set(set_b))) for r in dataset.records]
    return concordance_rate(preds_a, labels), concordance_rate(preds_b, labels)


# ---------------------------------------------------------------------------
# Reports and rendering

def divergence_flags(
    computed: dict[str, float | None],
    reference: dict[str, float],
    tol: float = 0.005,
    context: str = "",
) -> list[str]:
    """Flag entries where a computed figure disagrees with a quoted one."""
    flags = []
    for key in sorted(reference):
        have = computed.get(key)
        want = reference[key]
        if have is None or abs(have - want) > tol:
            label = f"{context}{key}" if context else key
            flags.append(
                f"{label}: computed {have if have is None else round(have, 4)} "
                f"differs from quoted {want}"
            )
    return flags


@dataclass
class ModelEvaluation:
    name: str
    matrix: ConfusionMatrix
    per_class: dict[GlycemicClass, ClassMetrics] = field(default_factory=dict)
    agreement: AgreementReport | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "confusion": self.matrix.to_lists(),
            "accuracy": self.matrix.accuracy(),
            "per_class": {c.slug: m.to_dict() for c, m in self.per_class.items()},
            "agreement": self.agreement.to_dict() if self.agreement else None,
        }


def evaluate_model(name: str, model, dataset: CohortDataset) -> ModelEvaluation:
    truth = dataset.labels()
    preds = predictions(model, dataset)
    cm = confusion_matrix(truth, preds)
    ev = ModelEvaluation(name=name, matrix=cm)
    ev.per_class = {c: per_class_metrics(cm, c) for c in CLASS_ORDER}
    try:
        ev.agreement = cohens_kappa(cm)
    except DegenerateMarginalsError:
        ev.agreement = None
    return ev


def _fmt(x: float | None, digits: int = 2) -> str:
    return "-" if x is None else f"{x:.{digits}f}"


def render_confusion_table(
    cm: ConfusionMatrix,
    per_class: dict[GlycemicClass, ClassMetrics] | None = None,
    title: str = "",
) -> str:
    """Text table: per-class counts with Correct (%), sensitivity, specificity."""
    if per_class is None:
        per_class = {c: per_class_metrics(cm, c) for c in CLASS_ORDER}
    headers = (
        ["Observations"]
        + [_SHORT[c] for c in CLASS_ORDER]
        + ["Correct (%)", "Sensitivity", "Specificity"]
    )
    rows = []
    for c in CLASS_ORDER:
        row_total = cm.row_sum(c)
        correct_pct = 100.0 * cm.counts[c.value][c.value] / row_total if row_total else None
        m = per_class[c]
        rows.append(
            [_SHORT[c]]
            + [str(v) for v in cm.counts[c.value]]
            + [_fmt(correct_pct, 1), _fmt(m.sensitivity), _fmt(m.specificity)]
        )
    rows.append(
        ["Overall"]
        + ["" for _ in CLASS_ORDER]
        + [_fmt(100.0 * cm.accuracy(), 1), "", ""]
    )
    widths = [max([len(headers[i])] + [len(str(r[i])) for r in rows]) for i in range(len(headers))]
    lines = []
    if title:
        lines.append(title)
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)))
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(str(v).ljust(widths[i]) for i, v in enumerate(r)))
    return "\n".join(lines) + "\n"


def render_age_table(bands: list[BandReport], title: str = "") -> str:
    headers = ["Age", "Patients", "Classified Correctly", "Classified False"]
    rows = [
        [f"{int(b.lo)}-{int(b.hi)} years", str(b.n), str(b.correct), str(b.false)]
        for b in bands
    ]
    widths = [max([len(headers[i])] + [len(str(r[i])) for r in rows]) for i in range(len(headers))]
    lines = []
    if title:
        lines.append(title)
    lines.append("  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)))
    lines.append("  ".join("-" * w for w in widths))
    for r in rows:
        lines.append("  ".join(v.ljust(widths[i]) for i, v in enumerate(r)))
    return "\n".join(lines) + "\n"
