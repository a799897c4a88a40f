"""End-to-end pipeline: cohort acquisition, split, preprocessing, training
per criterion, algorithm ranking, hybridization with the expert model, and
evaluation. Every stage is deterministic for a fixed seed and resumable from
the artifacts already on disk.

Stage randomness comes from fixed offsets of the config seed (synth: +0,
split: +1, ranking fold: +2); the offsets used are logged in report.json.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import metrics
from .cohort import (
    CohortDataset,
    CohortStatistics,
    FEATURES,
    normalize,
    parse_cohort,
    reference_statistics,
    serialize_cohort,
    stratified_split,
    synthesize_cohort,
)
from .errors import CdssError, ConfigError, StageError
from .hybrid import HybridModel, build_hybrid, coverage_report
from .induction import SplitCriterion, TrainHyperparams, rank_algorithms, train_tree_with_report
from .knowledge import build_reference_ckm, classify, enumerate_rules
from .metrics import concordance_rate, evaluate_model, feature_set_comparison, subgroup_report
from .persistence import load_model, save_model

CONFIG_VERSION = 1

DEFAULT_TRAIN_FRACTION = 650.0 / 1298.0
DEFAULT_CRITERIA = ("gini", "info_gain", "gain_ratio", "chi_square")
KEY_FEATURES = ("bmi", "hba1c", "fpg")  # reduced diagnostic indicator set


@dataclass(frozen=True)
class PipelineConfig:
    seed: int
    cohort_source: str  # "synthetic" | "csv"
    cohort_n: int
    stats: CohortStatistics
    csv_path: str | None
    train_fraction: float
    criteria: tuple[SplitCriterion, ...]
    max_depth: int
    min_leaf: int
    min_impurity_decrease: float
    rank_validation_fraction: float
    alpha: float
    ckm_source: str  # "reference" | "file"
    ckm_path: str | None

    def hyper(self, criterion: SplitCriterion) -> TrainHyperparams:
        return TrainHyperparams(
            criterion=criterion,
            max_depth=self.max_depth,
            min_leaf=self.min_leaf,
            min_impurity_decrease=self.min_impurity_decrease,
        )

    def stage_seeds(self) -> dict[str, int]:
        return {"synth": self.seed, "split": self.seed + 1, "rank_fold": self.seed + 2}


def parse_config(doc: dict, base_dir: Path | None = None) -> PipelineConfig:
    if not isinstance(doc, dict):
        raise ConfigError("<document>", "must be a JSON object")
    if doc.get("config_version") != CONFIG_VERSION:
        raise ConfigError("config_version", f"expected {CONFIG_VERSION}")
    if "seed" not in doc:
        raise ConfigError("seed")
    cohort = doc.get("cohort")
    if not isinstance(cohort, dict) or "source" not in cohort:
        raise ConfigError("cohort.source")
    source = cohort["source"]
    csv_path = None
    stats = reference_statistics()
    if source == "synthetic":
        if "n" not in cohort:
            raise ConfigError("cohort.n")
        if cohort.get("stats_path"):
            p = Path(cohort["stats_path"])
            if base_dir is not None and not p.is_absolute():
                p = base_dir / p
            stats = CohortStatistics.from_json(p.read_text(encoding="utf-8"))
    elif source == "csv":
        if not cohort.get("path"):
            raise ConfigError("cohort.path")
        csv_path = cohort["path"]
    else:
        raise ConfigError("cohort.source", f"unknown source {source!r}")

    ckm = doc.get("ckm")
    if not isinstance(ckm, dict) or "source" not in ckm:
        raise ConfigError("ckm.source")
    ckm_source = ckm["source"]
    ckm_path = None
    if ckm_source == "file":
        if not ckm.get("path"):
            raise ConfigError("ckm.path")
        ckm_path = ckm["path"]
    elif ckm_source != "reference":
        raise ConfigError("ckm.source", f"unknown source {ckm_source!r}")

    train = doc.get("train", {})
    try:
        criteria = tuple(SplitCriterion(c) for c in train.get("criteria", DEFAULT_CRITERIA))
    except ValueError as e:
        raise ConfigError("train.criteria", str(e)) from None
    split = doc.get("split", {})
    rank = doc.get("rank", {})
    hybrid = doc.get("hybrid", {})
    return PipelineConfig(
        seed=int(doc["seed"]),
        cohort_source=source,
        cohort_n=int(cohort.get("n", 0)),
        stats=stats,
        csv_path=csv_path,
        train_fraction=float(split.get("train_fraction", DEFAULT_TRAIN_FRACTION)),
        criteria=criteria,
        max_depth=int(train.get("max_depth", 12)),
        min_leaf=int(train.get("min_leaf", 2)),
        min_impurity_decrease=float(train.get("min_impurity_decrease", 0.0)),
        rank_validation_fraction=float(rank.get("validation_fraction", 0.25)),
        alpha=float(hybrid.get("alpha", 0.5)),
        ckm_source=ckm_source,
        ckm_path=ckm_path,
    )


def load_config(path: str | Path) -> PipelineConfig:
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(str(path), f"cannot read: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(str(path), f"not valid JSON: {e}") from None
    return parse_config(doc, base_dir=p.parent)


def default_config_doc(seed: int = 14, n: int = 1298) -> dict:
    return {
        "config_version": CONFIG_VERSION,
        "seed": seed,
        "cohort": {"source": "synthetic", "n": n},
        "split": {"train_fraction": DEFAULT_TRAIN_FRACTION},
        "train": {
            "criteria": list(DEFAULT_CRITERIA),
            "max_depth": 12,
            "min_leaf": 2,
            "min_impurity_decrease": 0.0,
        },
        "rank": {"validation_fraction": 0.25},
        "hybrid": {"alpha": 0.5},
        "ckm": {"source": "reference"},
    }


def _write_json(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def _read_dataset(path: Path, provenance: str) -> CohortDataset:
    return parse_cohort(path.read_text(encoding="utf-8"), provenance=provenance)


# ---------------------------------------------------------------------------
# Preprocessing shared by stages

def fit_preprocessing(train: CohortDataset) -> dict:
    """Imputation means and normalization params per numeric feature, fitted
    on the training split only. Features with no observed values are skipped
    (they stay missing and route through default branches)."""
    impute_means: dict[str, float] = {}
    norm_params: dict[str, dict] = {}
    for feat in train.schema:
        if feat.kind != "numeric":
            continue
        col = train.column(feat.name)
        observed = [v for v in col if v is not None]
        if not observed:
            continue
        impute_means[feat.name] = float(np.mean(observed))
        if len(observed) >= 2 and min(observed) != max(observed):
            _, params = normalize(col)
            norm_params[feat.name] = {"mu": params.mu, "sigma": params.sigma}
    return {"imputation": impute_means, "normalization": norm_params}


def apply_imputation(dataset: CohortDataset, impute_means: dict[str, float]) -> CohortDataset:
    records = []
    for r in dataset.records:
        changes = {
            name: mean
            for name, mean in impute_means.items()
            if r.value(name) is None
        }
        records.append(replace(r, **changes) if changes else r)
    return CohortDataset(records=tuple(records), schema=dataset.schema,
                         provenance=dataset.provenance)


# ---------------------------------------------------------------------------
# Stages

def stage_synth(cfg: PipelineConfig, out: Path) -> Path:
    dataset = synthesize_cohort(cfg.stats, cfg.cohort_n, seed=cfg.stage_seeds()["synth"])
    path = out / "cohort.csv"
    path.write_text(serialize_cohort(dataset), encoding="utf-8")
    return path


def stage_ingest(cfg: PipelineConfig, out: Path) -> Path:
    src = Path(cfg.csv_path)
    dataset = parse_cohort(src.read_text(encoding="utf-8"), provenance=f"file:{src.name}")
    path = out / "cohort.csv"
    path.write_text(serialize_cohort(dataset), encoding="utf-8")
    return path


def stage_train(cfg: PipelineConfig, out: Path) -> dict:
    dataset = _read_dataset(out / "cohort.csv", "cohort")
    train, test = stratified_split(dataset, cfg.train_fraction, seed=cfg.stage_seeds()["split"])
    (out / "train.csv").write_text(serialize_cohort(train), encoding="utf-8")
    (out / "test.csv").write_text(serialize_cohort(test), encoding="utf-8")

    prep = fit_preprocessing(train)
    _write_json(out / "preprocessing.json", prep)
    train_imputed = apply_imputation(train, prep["imputation"])

    reports = {}
    for criterion in cfg.criteria:
        tree, report = train_tree_with_report(train_imputed, cfg.hyper(criterion))
        save_model(tree, out / f"pm_{criterion.value}.json")
        reports[criterion.value] = report.to_dict()
    _write_json(out / "train_report.json", reports)
    return reports


def stage_rank(cfg: PipelineConfig, out: Path) -> dict:
    train = _read_dataset(out / "train.csv", "train")
    prep = fit_preprocessing(train)
    train_imputed = apply_imputation(train, prep["imputation"])
    subtrain, val = stratified_split(
        train_imputed, 1.0 - cfg.rank_validation_fraction, seed=cfg.stage_seeds()["rank_fold"]
    )
    entries = []
    for criterion in cfg.criteria:
        tree, _ = train_tree_with_report(subtrain, cfg.hyper(criterion))
        preds = [classify(tree, r)[0] for r in val.records]
        acc = concordance_rate(preds, val.labels())
        entries.append(
            (criterion.value, acc, len(enumerate_rules(tree)), len(tree.attributes_used()))
        )
    ranked = rank_algorithms(entries)
    doc = {
        "ranking": [
            {
                "name": r.name,
                "accuracy": r.accuracy,
                "rule_count": r.rule_count,
                "attribute_count": r.attribute_count,
                "rank": r.rank,
            }
            for r in ranked
        ],
        "selected": ranked[0].name,
    }
    _write_json(out / "ranking.json", doc)
    winner = load_model(out / f"pm_{ranked[0].name}.json")
    save_model(winner, out / "pm.json")
    return doc


def stage_hybridize(cfg: PipelineConfig, out: Path) -> HybridModel:
    if cfg.ckm_source == "reference":
        ckm = build_reference_ckm()
    else:
        ckm = load_model(Path(cfg.ckm_path))
    save_model(ckm, out / "ckm.json")
    pm = load_model(out / "pm.json")
    model = build_hybrid(ckm, pm, alpha=cfg.alpha)
    save_model(model.rckm, out / "rckm.json")
    _write_json(out / "graft_log.json", [g.to_dict() for g in model.graft_log])
    save_model(model, out / "hybrid.json")
    return model


def stage_evaluate(cfg: PipelineConfig, out: Path) -> dict:
    train = _read_dataset(out / "train.csv", "train")
    test = _read_dataset(out / "test.csv", "test")
    prep = fit_preprocessing(train)
    test_imputed = apply_imputation(test, prep["imputation"])

    ckm = load_model(out / "ckm.json")
    pm = load_model(out / "pm.json")
    hybrid_model = load_model(out / "hybrid.json")
    rckm = hybrid_model.rckm

    evaluations = {
        "ckm": evaluate_model("ckm", ckm, test_imputed),
        "pm": evaluate_model("pm", pm, test_imputed),
        "rckm": evaluate_model("rckm", rckm, test_imputed),
        "hybrid_blend": evaluate_model("hybrid_blend", hybrid_model, test_imputed),
    }
    coverage = {
        "ckm": coverage_report(ckm, test_imputed).to_dict(),
        "rckm": coverage_report(rckm, test_imputed).to_dict(),
    }
    bands = subgroup_report(test_imputed, hybrid_model)
    all_features = {f.name for f in FEATURES}
    conc_a, conc_b = feature_set_comparison(
        hybrid_model, test_imputed, all_features, set(KEY_FEATURES)
    )

    report = {
        "report_version": 1,
        "seeds": cfg.stage_seeds(),
        "n_train": len(train),
        "n_test": len(test),
        "models": {name: ev.to_dict() for name, ev in evaluations.items()},
        "coverage": coverage,
        "age_bands": [b.to_dict() for b in bands],
        "feature_sets": {
            "set_a": sorted(all_features),
            "set_b": sorted(KEY_FEATURES),
            "concordance_a": conc_a,
            "concordance_b": conc_b,
        },
    }
    _write_json(out / "report.json", report)

    tables = []
    for name, ev in evaluations.items():
        tables.append(metrics.render_confusion_table(ev.matrix, ev.per_class, title=name))
    tables.append(metrics.render_age_table(bands, title="diagnostic accuracy by age group"))
    (out / "tables.txt").write_text("\n".join(tables), encoding="utf-8")
    return report


STAGES = ("data", "train", "rank", "hybridize", "evaluate")


def run_pipeline(cfg: PipelineConfig, out_dir: str | Path) -> dict[str, Path]:
    """Run every stage in order; artifacts land in out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    def guarded(stage: str, fn):
        try:
            return fn()
        except CdssError:
            raise
        except Exception as e:  # noqa: BLE001 - wrap with stage context
            raise StageError(stage, e) from e

    if cfg.cohort_source == "synthetic":
        guarded("synth", lambda: stage_synth(cfg, out))
    else:
        guarded("ingest", lambda: stage_ingest(cfg, out))
    guarded("train", lambda: stage_train(cfg, out))
    guarded("rank", lambda: stage_rank(cfg, out))
    guarded("hybridize", lambda: stage_hybridize(cfg, out))
    guarded("evaluate", lambda: stage_evaluate(cfg, out))

    names = [
        "cohort.csv", "train.csv", "test.csv", "preprocessing.json",
        "train_report.json", "ranking.json", "pm.json", "ckm.json",
        "rckm.json", "graft_log.json", "hybrid.json", "report.json", "tables.txt",
    ]
    return {n: out / n for n in names}
