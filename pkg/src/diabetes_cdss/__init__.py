"""White-box hybrid clinical decision support for four-class type 2 diabetes
staging: expert tree + learned tree, score blending and structural grafting,
evaluation harness, and a diagnosis service."""

from .cohort import (
    CLASS_ORDER,
    CohortDataset,
    CohortStatistics,
    FEATURES,
    GlycemicClass,
    NormalizationParams,
    PatientRecord,
    impute_missing,
    label_by_ada,
    normalize,
    parse_cohort,
    reference_statistics,
    serialize_cohort,
    stratified_split,
    synthesize_cohort,
)
from .hybrid import (
    GraftEntry,
    HybridModel,
    blend_predict,
    build_hybrid,
    coverage_report,
    merge_models,
)
from .induction import (
    RankScore,
    SplitCandidate,
    SplitCriterion,
    TrainHyperparams,
    best_split,
    predict_proba,
    rank_algorithms,
    rfe_select,
    train_tree,
    train_tree_with_report,
)
from .knowledge import (
    DecisionPath,
    DecisionTree,
    Predicate,
    Rule,
    TreeNode,
    build_reference_ckm,
    classify,
    clinical_markers,
    enumerate_rules,
    parse_knowledge_model,
    tree_to_dict,
    tree_to_json,
    validate_tree,
)
from .metrics import (
    AgreementReport,
    ClassMetrics,
    ConfusionMatrix,
    cohens_kappa,
    concordance_rate,
    confusion_matrix,
    feature_set_comparison,
    per_class_metrics,
    subgroup_report,
)
from .persistence import load_model, save_model
from .pipeline import PipelineConfig, default_config_doc, load_config, run_pipeline

__version__ = "0.1.0"
