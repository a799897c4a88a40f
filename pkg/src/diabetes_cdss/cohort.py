"""Patient cohort data model: CSV ingestion, preprocessing, ADA staging labels,
stratified splitting, and a seeded synthetic cohort generator.

All operations are pure given their inputs and seed; datasets are treated as
immutable after construction.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.stats import norm, truncnorm

from .errors import (
    AllMissingError,
    DegenerateSigmaError,
    DuplicateIdError,
    InsufficientGlycemicDataError,
    InvalidRecordError,
    InvalidStatisticsError,
    MissingColumnError,
    TypeMismatchError,
    UnlabeledRecordError,
)


class GlycemicClass(enum.IntEnum):
    """Four-way glycemic staging outcome.

    The integer value is the severity rank (0 = most severe) and doubles as
    the index into 4-class probability distributions.
    """

    VERIFIED_DIABETES = 0
    PREDIABETES = 1
    AT_RISK = 2
    NO_DIABETES = 3

    @property
    def slug(self) -> str:
        return _CLASS_SLUGS[self]

    @classmethod
    def from_slug(cls, slug: str) -> "GlycemicClass":
        try:
            return _SLUG_CLASSES[slug]
        except KeyError:
            raise ValueError(f"unknown glycemic class {slug!r}") from None


_CLASS_SLUGS = {
    GlycemicClass.VERIFIED_DIABETES: "verified_diabetes",
    GlycemicClass.PREDIABETES: "prediabetes",
    GlycemicClass.AT_RISK: "at_risk",
    GlycemicClass.NO_DIABETES: "no_diabetes",
}
_SLUG_CLASSES = {v: k for k, v in _CLASS_SLUGS.items()}

#: Fixed class order used everywhere a 4-vector appears.
CLASS_ORDER: tuple[GlycemicClass, ...] = tuple(GlycemicClass)


@dataclass(frozen=True)
class Feature:
    """One column of the cohort schema."""

    name: str
    kind: str  # "numeric" | "categorical"
    unit: str | None = None
    values: tuple | None = None  # declared categories, when categorical
    bounds: tuple[float, float] | None = None  # physiologic (lo, hi), when numeric


#: Canonical feature schema, in CSV column order (id and label excluded).
FEATURES: tuple[Feature, ...] = (
    Feature("age", "numeric", "years", bounds=(0.0, 130.0)),
    Feature("sex", "categorical", values=("male", "female")),
    Feature("family_history", "categorical", values=(True, False)),
    Feature("physical_activity", "categorical", values=("high", "low")),
    Feature("bmi", "numeric", "kg/m2", bounds=(5.0, 100.0)),
    Feature("fpg", "numeric", "mg/dL", bounds=(20.0, 1000.0)),
    Feature("hba1c", "numeric", "percent", bounds=(2.0, 20.0)),
    Feature("ogtt_2h", "numeric", "mg/dL", bounds=(20.0, 1000.0)),
    Feature("random_glucose", "numeric", "mg/dL", bounds=(20.0, 1000.0)),
    Feature("sbp", "numeric", "mmHg"),
    Feature("dbp", "numeric", "mmHg"),
    Feature("triglycerides", "numeric", "mg/dL"),
    Feature("hdl", "numeric", "mg/dL"),
    Feature("waist", "numeric", "cm"),
    Feature("symptoms", "categorical", values=(True, False)),
    Feature("balanced_diet", "categorical", values=(True, False)),
    Feature("htn_medication", "categorical", values=(True, False)),
)

FEATURE_NAMES: tuple[str, ...] = tuple(f.name for f in FEATURES)
FEATURE_BY_NAME: dict[str, Feature] = {f.name: f for f in FEATURES}

CSV_HEADER = ["id"] + list(FEATURE_NAMES) + ["label"]


@dataclass(frozen=True)
class PatientRecord:
    """One patient's feature vector; any measurement may be missing (None)."""

    id: str
    age: float | None = None
    sex: str | None = None
    family_history: bool | None = None
    physical_activity: str | None = None
    bmi: float | None = None
    fpg: float | None = None
    hba1c: float | None = None
    ogtt_2h: float | None = None
    random_glucose: float | None = None
    sbp: float | None = None
    dbp: float | None = None
    triglycerides: float | None = None
    hdl: float | None = None
    waist: float | None = None
    symptoms: bool | None = None
    balanced_diet: bool | None = None
    htn_medication: bool | None = None
    label: GlycemicClass | None = None

    def value(self, feature: str):
        """Value of a schema feature by name (None when missing)."""
        if feature not in FEATURE_BY_NAME:
            raise KeyError(f"not a schema feature: {feature!r}")
        return getattr(self, feature)

    def invariant_problems(self) -> list[str]:
        """Physiologic-range violations, empty when the record is valid."""
        problems = []
        for feat in FEATURES:
            v = getattr(self, feat.name)
            if v is None:
                continue
            if feat.kind == "numeric" and feat.bounds is not None:
                lo, hi = feat.bounds
                closed = feat.name == "age"  # age bounds are inclusive
                ok = (lo <= v <= hi) if closed else (lo < v < hi)
                if not ok:
                    problems.append(f"{feat.name}={v} outside ({lo}, {hi})")
            elif feat.kind == "categorical" and feat.values is not None:
                if v not in feat.values:
                    problems.append(f"{feat.name}={v!r} not in {feat.values}")
        if self.sbp is not None and self.dbp is not None and not self.sbp > self.dbp:
            problems.append(f"sbp={self.sbp} not greater than dbp={self.dbp}")
        return problems

    def masked(self, keep: set[str]) -> "PatientRecord":
        """Copy with every schema feature outside `keep` set to missing."""
        changes = {f.name: None for f in FEATURES if f.name not in keep}
        return replace(self, **changes)


@dataclass(frozen=True)
class CohortDataset:
    records: tuple[PatientRecord, ...]
    schema: tuple[Feature, ...] = FEATURES
    provenance: str = "unknown"  # e.g. "file:<name>" or "synthetic:<seed>"

    def __len__(self) -> int:
        return len(self.records)

    def labels(self) -> list[GlycemicClass]:
        out = []
        for r in self.records:
            if r.label is None:
                raise UnlabeledRecordError(r.id)
            out.append(r.label)
        return out

    def column(self, feature: str) -> list:
        return [r.value(feature) for r in self.records]


# ---------------------------------------------------------------------------
# CSV ingestion

_BOOL_TOKENS = {"true": True, "false": False}


def _parse_cell(row_idx: int, feat: Feature, raw: str):
    raw = raw.strip()
    if raw == "":
        return None
    if feat.kind == "numeric":
        try:
            return float(raw)
        except ValueError:
            raise TypeMismatchError(row_idx, feat.name, raw) from None
    if feat.values and feat.values == (True, False):
        if raw.lower() not in _BOOL_TOKENS:
            raise TypeMismatchError(row_idx, feat.name, raw)
        return _BOOL_TOKENS[raw.lower()]
    if feat.values and raw not in feat.values:
        raise TypeMismatchError(row_idx, feat.name, raw)
    return raw


def parse_cohort(text: str, provenance: str = "file") -> CohortDataset:
    """Parse the canonical CSV document into a dataset.

    Empty cells are missing values. Rows violating physiologic invariants are
    rejected with their (1-based, header excluded) row index.
    """
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingColumnError("id") from None
    header = [h.strip() for h in header]
    for col in CSV_HEADER:
        if col not in header:
            raise MissingColumnError(col)
    idx = {col: header.index(col) for col in CSV_HEADER}

    records: list[PatientRecord] = []
    seen_ids: set[str] = set()
    for row_idx, row in enumerate(reader, start=1):
        if not row or all(c.strip() == "" for c in row):
            continue
        rid = row[idx["id"]].strip()
        if rid == "":
            raise TypeMismatchError(row_idx, "id", "")
        if rid in seen_ids:
            raise DuplicateIdError(rid)
        seen_ids.add(rid)
        kwargs = {}
        for feat in FEATURES:
            kwargs[feat.name] = _parse_cell(row_idx, feat, row[idx[feat.name]])
        raw_label = row[idx["label"]].strip()
        label = None
        if raw_label:
            try:
                label = GlycemicClass.from_slug(raw_label)
            except ValueError:
                raise TypeMismatchError(row_idx, "label", raw_label) from None
        rec = PatientRecord(id=rid, label=label, **kwargs)
        problems = rec.invariant_problems()
        if problems:
            raise InvalidRecordError(row_idx, "; ".join(problems))
        records.append(rec)
    return CohortDataset(records=tuple(records), provenance=provenance)


def _render_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value) if not value.is_integer() else str(int(value))
    return str(value)


def serialize_cohort(dataset: CohortDataset) -> str:
    """Inverse of parse_cohort; round-trips to an equal dataset."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in dataset.records:
        row = [r.id]
        row += [_render_cell(r.value(name)) for name in FEATURE_NAMES]
        row.append(r.label.slug if r.label is not None else "")
        writer.writerow(row)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Preprocessing

@dataclass(frozen=True)
class NormalizationParams:
    """Per-feature location/scale; sigma is the population standard deviation."""

    mu: float
    sigma: float

    @property
    def degenerate(self) -> bool:
        return self.sigma == 0.0


def normalize(
    values: list[float | None],
    params: NormalizationParams | None = None,
) -> tuple[list[float | None], NormalizationParams]:
    """Center/scale a feature series to (x - mu) / sigma.

    When params is None they are computed from the series (population sigma)
    and returned so the same transform can be reapplied to held-out data.
    Missing entries pass through unchanged.
    """
    observed = [v for v in values if v is not None]
    if params is None:
        if len(observed) < 2:
            raise DegenerateSigmaError("need at least 2 observed values to fit")
        mu = float(np.mean(observed))
        sigma = float(np.std(observed))  # ddof=0
        if sigma == 0.0:
            raise DegenerateSigmaError(f"constant series (mu={mu})")
        params = NormalizationParams(mu=mu, sigma=sigma)
    if params.degenerate:
        raise DegenerateSigmaError("sigma is zero")
    out = [None if v is None else (v - params.mu) / params.sigma for v in values]
    return out, params


def denormalize(values: list[float | None], params: NormalizationParams) -> list[float | None]:
    return [None if v is None else v * params.sigma + params.mu for v in values]


def impute_missing(values: list[float | None]) -> list[float]:
    """Replace missing entries with the mean of the observed ones."""
    observed = [v for v in values if v is not None]
    if not observed:
        raise AllMissingError("no observed values to impute from")
    mean = float(np.mean(observed))
    return [mean if v is None else v for v in values]


def stratified_split(
    dataset: CohortDataset, train_fraction: float, seed: int
) -> tuple[CohortDataset, CohortDataset]:
    """Split preserving class proportions; deterministic for a fixed seed.

    Per class, round(train_fraction * class_size) records (half-up) go to
    train; the remainder goes to test. Record order within each part follows
    the input dataset.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    by_class: dict[GlycemicClass, list[int]] = {c: [] for c in CLASS_ORDER}
    for i, r in enumerate(dataset.records):
        if r.label is None:
            raise UnlabeledRecordError(r.id)
        by_class[r.label].append(i)

    rng = np.random.default_rng(seed)
    train_idx: set[int] = set()
    for c in CLASS_ORDER:  # fixed iteration order keeps the rng stream stable
        members = by_class[c]
        if not members:
            continue
        k = int(math.floor(train_fraction * len(members) + 0.5))
        perm = rng.permutation(len(members))
        train_idx.update(members[j] for j in perm[:k])

    train = tuple(r for i, r in enumerate(dataset.records) if i in train_idx)
    test = tuple(r for i, r in enumerate(dataset.records) if i not in train_idx)
    prov = dataset.provenance
    return (
        CohortDataset(records=train, schema=dataset.schema, provenance=f"{prov}/train"),
        CohortDataset(records=test, schema=dataset.schema, provenance=f"{prov}/test"),
    )


# ---------------------------------------------------------------------------
# ADA staging rules

# Diagnostic thresholds (mg/dL, percent). The prediabetes bands are contiguous
# with the diabetes thresholds: [100, 126) FPG, [5.7, 6.5) HbA1c, [140, 200)
# OGTT. Closing the bands at 125/6.4/199 would leave unclassifiable slivers
# and break monotonicity for fractional measurements.
FPG_DIABETES = 126.0
FPG_PREDIABETES = 100.0
HBA1C_DIABETES = 6.5
HBA1C_PREDIABETES = 5.7
OGTT_DIABETES = 200.0
OGTT_PREDIABETES = 140.0
RANDOM_GLUCOSE_DIABETES = 200.0


def label_by_ada(record: PatientRecord) -> GlycemicClass:
    """Stage a patient by ADA diagnostic thresholds.

    Requires at least one glycemic measurement (fpg, hba1c, ogtt_2h, or
    random_glucose).
    """
    glycemic = (record.fpg, record.hba1c, record.ogtt_2h, record.random_glucose)
    if all(v is None for v in glycemic):
        raise InsufficientGlycemicDataError(f"record {record.id!r} has no glycemic measurement")

    fpg, a1c, ogtt, rg = glycemic
    if (
        (fpg is not None and fpg >= FPG_DIABETES)
        or (a1c is not None and a1c >= HBA1C_DIABETES)
        or (ogtt is not None and ogtt >= OGTT_DIABETES)
        or (record.symptoms is True and rg is not None and rg >= RANDOM_GLUCOSE_DIABETES)
    ):
        return GlycemicClass.VERIFIED_DIABETES
    if (
        (fpg is not None and fpg >= FPG_PREDIABETES)
        or (a1c is not None and a1c >= HBA1C_PREDIABETES)
        or (ogtt is not None and ogtt >= OGTT_PREDIABETES)
    ):
        return GlycemicClass.PREDIABETES
    if has_risk_factor(record):
        return GlycemicClass.AT_RISK
    return GlycemicClass.NO_DIABETES


def has_risk_factor(record: PatientRecord) -> bool:
    return bool(
        record.family_history is True
        or (record.bmi is not None and record.bmi > 25.0)
        or record.htn_medication is True
        or record.physical_activity == "low"
    )


# ---------------------------------------------------------------------------
# Cohort statistics & synthetic generation

STATS_VERSION = 1


@dataclass(frozen=True)
class GroupStats:
    """Per-group feature summaries: numeric mean/sd and categorical prevalences."""

    numeric: dict[str, tuple[float, float]]  # feature -> (mean, sd)
    categorical: dict[str, float]  # feature -> prevalence of the "positive" level


@dataclass(frozen=True)
class CohortStatistics:
    """Group-wise population statistics parameterizing the generator."""

    groups: dict[str, GroupStats]
    mix: dict[str, float]  # group -> proportion, sums to 1

    def validate(self) -> None:
        if not self.groups:
            raise InvalidStatisticsError("no groups defined")
        if set(self.groups) != set(self.mix):
            raise InvalidStatisticsError("group names and mix proportions disagree")
        total = sum(self.mix.values())
        if not math.isclose(total, 1.0, rel_tol=0, abs_tol=1e-9):
            raise InvalidStatisticsError(f"mix proportions sum to {total}, expected 1")
        for gname, g in self.groups.items():
            for feat, (mean, sd) in g.numeric.items():
                if feat not in FEATURE_BY_NAME:
                    raise InvalidStatisticsError(f"unknown feature {feat!r} in group {gname!r}")
                if sd < 0 or not math.isfinite(mean) or not math.isfinite(sd):
                    raise InvalidStatisticsError(f"{gname}/{feat}: invalid mean/sd ({mean}, {sd})")
            for feat, p in g.categorical.items():
                if not 0.0 <= p <= 1.0:
                    raise InvalidStatisticsError(f"{gname}/{feat}: prevalence {p} outside [0,1]")

    def to_dict(self) -> dict:
        return {
            "stats_version": STATS_VERSION,
            "mix": dict(sorted(self.mix.items())),
            "groups": {
                name: {
                    "numeric": {k: [m, s] for k, (m, s) in sorted(g.numeric.items())},
                    "categorical": dict(sorted(g.categorical.items())),
                }
                for name, g in sorted(self.groups.items())
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CohortStatistics":
        if doc.get("stats_version") != STATS_VERSION:
            raise InvalidStatisticsError(
                f"unsupported stats_version {doc.get('stats_version')!r}"
            )
        groups = {
            name: GroupStats(
                numeric={k: (float(v[0]), float(v[1])) for k, v in g.get("numeric", {}).items()},
                categorical={k: float(v) for k, v in g.get("categorical", {}).items()},
            )
            for name, g in doc.get("groups", {}).items()
        }
        stats = cls(groups=groups, mix={k: float(v) for k, v in doc.get("mix", {}).items()})
        stats.validate()
        return stats

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CohortStatistics":
        return cls.from_dict(json.loads(text))


def reference_statistics() -> CohortStatistics:
    """Summary statistics of the reference screening population.

    Two groups (type 2 diabetic vs non-diabetic) with the published clinical
    and demographic summaries; the diabetic share matches the 531/648 test
    cohort composition.
    """
    diabetic = GroupStats(
        numeric={
            "age": (55.2, 14.3),
            "bmi": (30.2, 4.8),
            "fpg": (150.2, 35.61),
            "hba1c": (7.5, 1.2),
            "sbp": (140.0, 15.0),
            "dbp": (90.0, 10.0),
            "triglycerides": (200.10, 60.40),
            "hdl": (40.3, 10.5),
            "waist": (105.5, 10.5),
        },
        categorical={
            "sex": 0.55,  # male fraction
            "family_history": 0.685,
            "physical_activity": 0.36,  # "high" fraction
            "balanced_diet": 0.30,
            "htn_medication": 0.50,
            "symptoms": 0.457,
        },
    )
    nondiabetic = GroupStats(
        numeric={
            "age": (45.4, 12.6),
            "bmi": (24.5, 3.2),
            "fpg": (95.4, 10.3),
            "hba1c": (5.2, 0.4),
            "sbp": (120.0, 10.0),
            "dbp": (80.0, 5.0),
            "triglycerides": (100.5, 20.30),
            "hdl": (55.2, 12.1),
            "waist": (85.4, 7.3),
        },
        categorical={
            "sex": 0.41,
            "family_history": 0.204,
            "physical_activity": 0.76,
            "balanced_diet": 0.65,
            "htn_medication": 0.16,
            "symptoms": 0.052,
        },
    )
    return CohortStatistics(
        groups={"diabetic": diabetic, "nondiabetic": nondiabetic},
        mix={"diabetic": 531.0 / 648.0, "nondiabetic": 117.0 / 648.0},
    )


_ROUNDING = {  # decimals kept per generated numeric feature
    "age": 0,
    "bmi": 1,
    "fpg": 1,
    "hba1c": 2,
    "sbp": 0,
    "dbp": 0,
    "triglycerides": 1,
    "hdl": 1,
    "waist": 1,
}

_GENERATOR_BOUNDS = {  # sampling bounds = physiologic ranges
    "age": (0.0, 130.0),
    "bmi": (5.0, 100.0),
    "fpg": (20.0, 1000.0),
    "hba1c": (2.0, 20.0),
    "sbp": (60.0, 260.0),
    "dbp": (30.0, 200.0),
    "triglycerides": (10.0, 2000.0),
    "hdl": (5.0, 200.0),
    "waist": (30.0, 250.0),
}


#: Within-group rank correlations between physiologically linked markers:
#: fasting glucose and HbA1c both measure glycemia, waist circumference
#: tracks BMI. Sampling them independently scatters implausible marker
#: combinations; the Gaussian copula keeps every marginal mean/SD exact.
COUPLED_PAIRS: tuple[tuple[str, str, float], ...] = (
    ("fpg", "hba1c", 0.8),
    ("bmi", "waist", 0.85),
)


def _ppf_truncnorm(u: float, mean: float, sd: float, lo: float, hi: float) -> float:
    if sd == 0.0:
        return float(min(max(mean, lo), hi))
    u = min(max(u, 1e-12), 1.0 - 1e-12)
    a, b = (lo - mean) / sd, (hi - mean) / sd
    return float(truncnorm.ppf(u, a, b, loc=mean, scale=sd))


def _apportion(n: int, mix: dict[str, float]) -> dict[str, int]:
    """Largest-remainder apportionment of n across groups (deterministic)."""
    names = sorted(mix)
    raw = {g: n * mix[g] for g in names}
    counts = {g: int(math.floor(raw[g])) for g in names}
    short = n - sum(counts.values())
    for g in sorted(names, key=lambda g: (-(raw[g] - counts[g]), g))[:short]:
        counts[g] += 1
    return counts


def synthesize_cohort(stats: CohortStatistics, n: int, seed: int) -> CohortDataset:
    """Generate n labeled records from group-wise truncated-normal statistics.

    Physiologically linked marker pairs (COUPLED_PAIRS) are drawn through a
    Gaussian copula so they co-vary as they do clinically; every marginal
    keeps its stated mean/SD. Each record's label comes from the ADA rules
    applied to its own generated values, not from the sampled group, so
    labels are internally consistent. Record ids encode the sampled group
    ("d"/"n" prefix).
    """
    if n < 1:
        raise InvalidStatisticsError("n must be >= 1")
    stats.validate()
    rng = np.random.default_rng(seed)
    counts = _apportion(n, stats.mix)

    group_of: list[str] = []
    for g in sorted(counts):
        group_of += [g] * counts[g]
    order = rng.permutation(n)

    records: list[PatientRecord] = []
    serial = {g: 0 for g in counts}
    for pos in range(n):
        g = group_of[order[pos]]
        serial[g] += 1
        gs = stats.groups[g]
        kwargs: dict = {}
        coupled: dict[str, float] = {}
        for a, b, rho in COUPLED_PAIRS:
            if a in gs.numeric and b in gs.numeric:
                z1, z2 = rng.standard_normal(2)
                coupled[a] = z1
                coupled[b] = rho * z1 + math.sqrt(1.0 - rho * rho) * z2
        for feat, (mean, sd) in sorted(gs.numeric.items()):
            z = coupled.get(feat)
            if z is None:
                z = float(rng.standard_normal())
            lo, hi = _GENERATOR_BOUNDS.get(feat, (mean - 6 * sd, mean + 6 * sd))
            v = _ppf_truncnorm(float(norm.cdf(z)), mean, sd, lo, hi)
            kwargs[feat] = round(v, _ROUNDING.get(feat, 2))
        # keep pressures physiologic: diastolic strictly below systolic
        if "sbp" in kwargs and "dbp" in kwargs:
            tries = 0
            while kwargs["dbp"] >= kwargs["sbp"] and tries < 100:
                m, s = gs.numeric["dbp"]
                lo, hi = _GENERATOR_BOUNDS["dbp"]
                u = float(norm.cdf(rng.standard_normal()))
                kwargs["dbp"] = round(_ppf_truncnorm(u, m, s, lo, hi), _ROUNDING["dbp"])
                tries += 1
            if kwargs["dbp"] >= kwargs["sbp"]:
                kwargs["dbp"] = kwargs["sbp"] - 5.0
        for feat, p in sorted(gs.categorical.items()):
            hit = bool(rng.random() < p)
            if feat == "sex":
                kwargs[feat] = "male" if hit else "female"
            elif feat == "physical_activity":
                kwargs[feat] = "high" if hit else "low"
            else:
                kwargs[feat] = hit
        rid = f"{g[0]}{serial[g]:05d}"
        rec = PatientRecord(id=rid, **kwargs)
        rec = replace(rec, label=label_by_ada(rec))
        records.append(rec)

    return CohortDataset(records=tuple(records), provenance=f"synthetic:{seed}")
