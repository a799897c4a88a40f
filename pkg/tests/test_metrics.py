import numpy as np
import pytest

from conftest import make_dataset

from diabetes_cdss import (
    AgreementReport,
    ConfusionMatrix,
    GlycemicClass,
    cohens_kappa,
    concordance_rate,
    confusion_matrix,
    feature_set_comparison,
    per_class_metrics,
    subgroup_report,
)
from diabetes_cdss.errors import (
    DegenerateMarginalsError,
    EmptyInputError,
    InvalidSubsetError,
    LengthMismatchError,
    OverlappingBandsError,
)
from diabetes_cdss.metrics import (
    divergence_flags,
    render_age_table,
    render_confusion_table,
)

VD, PRE, AR, ND = GlycemicClass

# Published hybrid-system matrix used as a reconstruction fixture (rows are
# truth, columns predictions, severity order).
REFERENCE_COUNTS = [
    [212, 0, 0, 0],
    [0, 154, 0, 3],
    [0, 0, 120, 1],
    [0, 0, 4, 108],
]


def stream_from_counts(counts):
    truth, pred = [], []
    for i, row in enumerate(counts):
        for j, n in enumerate(row):
            truth += [GlycemicClass(i)] * n
            pred += [GlycemicClass(j)] * n
    return truth, pred


# ---------------------------------------------------------------------------
# Confusion matrix

def test_identical_streams_give_diagonal():
    labels = [VD, PRE, AR, ND, VD]
    cm = confusion_matrix(labels, labels)
    assert cm.trace == cm.total == 5
    assert cm.accuracy() == 1.0


def test_reference_counts_reconstruct_exactly():
    truth, pred = stream_from_counts(REFERENCE_COUNTS)
    cm = confusion_matrix(truth, pred)
    assert cm.to_lists() == REFERENCE_COUNTS
    assert cm.total == 602
    assert cm.trace == 594
    assert cm.accuracy() == pytest.approx(594 / 602)


def test_length_mismatch_and_empty():
    with pytest.raises(LengthMismatchError):
        confusion_matrix([VD, VD, VD], [VD] * 4)
    with pytest.raises(EmptyInputError):
        confusion_matrix([], [])


def test_row_and_column_sums():
    rng = np.random.default_rng(5)
    truth = [GlycemicClass(int(v)) for v in rng.integers(0, 4, 200)]
    pred = [GlycemicClass(int(v)) for v in rng.integers(0, 4, 200)]
    cm = confusion_matrix(truth, pred)
    for c in GlycemicClass:
        assert cm.row_sum(c) == sum(1 for t in truth if t is c)
        assert cm.col_sum(c) == sum(1 for p in pred if p is c)


# ---------------------------------------------------------------------------
# One-vs-rest metrics

def test_perfect_two_by_two_embedding():
    cm = confusion_matrix([VD, ND], [VD, ND])
    m = per_class_metrics(cm, VD)
    assert (m.accuracy, m.sensitivity, m.specificity) == (1.0, 1.0, 1.0)


def test_reference_prediabetes_sensitivity():
    truth, pred = stream_from_counts(REFERENCE_COUNTS)
    cm = confusion_matrix(truth, pred)
    m = per_class_metrics(cm, PRE)
    assert m.tp == 154 and m.fn == 3
    assert m.sensitivity == pytest.approx(154 / 157)


def test_empty_class_row_gives_none_sensitivity():
    cm = ConfusionMatrix.from_lists([[5, 0, 0, 0], [0, 0, 0, 0], [0, 0, 3, 0], [0, 0, 0, 2]])
    m = per_class_metrics(cm, PRE)
    assert m.sensitivity is None
    assert m.specificity is not None


def test_one_vs_rest_counts_sum_to_total():
    rng = np.random.default_rng(11)
    for _ in range(20):
        counts = rng.integers(0, 30, (4, 4))
        if counts.sum() == 0:
            continue
        cm = ConfusionMatrix.from_lists(counts.tolist())
        for c in GlycemicClass:
            m = per_class_metrics(cm, c)
            assert m.tp + m.fn + m.fp + m.tn == cm.total


# ---------------------------------------------------------------------------
# Kappa

def test_kappa_perfect_agreement():
    cm = confusion_matrix([VD, PRE, AR, ND], [VD, PRE, AR, ND])
    report = cohens_kappa(cm)
    assert report.kappa == pytest.approx(1.0)
    assert report.p_o == 1.0
    assert report.concordance == 1.0


def test_kappa_hand_computed_two_by_two():
    cm = ConfusionMatrix.from_lists([[50, 10, 0, 0], [5, 35, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    report = cohens_kappa(cm)
    assert report.p_o == pytest.approx(0.85)
    assert report.p_e == pytest.approx(0.51)
    assert report.kappa == pytest.approx(0.34 / 0.49)


def test_kappa_near_zero_for_random_predictions():
    rng = np.random.default_rng(99)
    n = 10_000
    truth = [GlycemicClass(int(v)) for v in rng.integers(0, 4, n)]
    pred = [GlycemicClass(int(v)) for v in rng.integers(0, 4, n)]
    report = cohens_kappa(confusion_matrix(truth, pred))
    assert abs(report.kappa) < 0.05


def test_kappa_degenerate_marginals():
    cm = ConfusionMatrix.from_lists([[7, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]])
    with pytest.raises(DegenerateMarginalsError):
        cohens_kappa(cm)


def test_kappa_invariant_under_cell_scaling():
    base = [[50, 10, 2, 0], [5, 35, 1, 3], [2, 2, 20, 1], [0, 4, 2, 30]]
    k1 = cohens_kappa(ConfusionMatrix.from_lists(base)).kappa
    scaled = [[v * 7 for v in row] for row in base]
    k7 = cohens_kappa(ConfusionMatrix.from_lists(scaled)).kappa
    assert k1 == pytest.approx(k7, abs=1e-12)


# ---------------------------------------------------------------------------
# Concordance

def test_concordance_basics():
    assert concordance_rate([VD, PRE], [VD, PRE]) == 1.0
    assert concordance_rate([VD] * 100 + [PRE, PRE], [VD] * 100 + [ND, ND]) == pytest.approx(100 / 102)
    assert concordance_rate([VD, VD], [ND, ND]) == 0.0


def test_concordance_symmetric_and_reflexive():
    rng = np.random.default_rng(3)
    a = [GlycemicClass(int(v)) for v in rng.integers(0, 4, 60)]
    b = [GlycemicClass(int(v)) for v in rng.integers(0, 4, 60)]
    assert concordance_rate(a, a) == 1.0
    assert concordance_rate(a, b) == concordance_rate(b, a)


def test_concordance_length_mismatch():
    with pytest.raises(LengthMismatchError):
        concordance_rate([VD], [VD, ND])


# ---------------------------------------------------------------------------
# Subgroups

def constant_model(cls=ND):
    from test_knowledge import single_leaf_tree

    return single_leaf_tree(cls)


def test_single_band_covers_whole_dataset(ckm):
    rows = [
        {"age": 30.0 + i, "hba1c": 7.0, "fpg": 150.0, "bmi": 30.0,
         "label": GlycemicClass.VERIFIED_DIABETES}
        for i in range(10)
    ]
    ds = make_dataset(rows)
    bands = subgroup_report(ds, ckm, age_bands=((0, 130),))
    assert len(bands) == 1
    assert bands[0].n == 10
    assert bands[0].correct == 10 and bands[0].false == 0


def test_age_band_reconstruction():
    rows = []
    for i in range(315):
        rows.append({"age": 61.0 + (i % 20), "fpg": 100.0, "label": ND})
    for i in range(5):
        rows.append({"age": 61.0 + (i % 20), "fpg": 100.0, "label": AR})
    ds = make_dataset(rows)
    bands = subgroup_report(ds, constant_model(ND))
    by_band = {(b.lo, b.hi): b for b in bands}
    row = by_band[(61, 80)]
    assert (row.n, row.correct, row.false) == (320, 315, 5)


def test_overlapping_bands_rejected(ckm):
    ds = make_dataset([{"age": 30.0, "fpg": 100.0, "label": ND}])
    with pytest.raises(OverlappingBandsError):
        subgroup_report(ds, ckm, age_bands=((20, 40), (35, 60)))


def test_band_counts_cover_in_band_records(ckm, stats):
    from diabetes_cdss import synthesize_cohort

    ds = synthesize_cohort(stats, 120, seed=21)
    bands = subgroup_report(ds, ckm)
    in_band = sum(
        1 for r in ds.records
        if r.age is not None and any(lo <= r.age <= hi for lo, hi in ((20, 40), (41, 60), (61, 80), (81, 100)))
    )
    assert sum(b.n for b in bands) == in_band


# ---------------------------------------------------------------------------
# Feature-set comparison

def test_equal_sets_give_equal_concordance(ckm, stats):
    from diabetes_cdss import synthesize_cohort

    ds = synthesize_cohort(stats, 80, seed=22)
    full = {f.name for f in ds.schema}
    a, b = feature_set_comparison(ckm, ds, full, full)
    assert a == b


def test_model_restricted_to_key_features_is_mask_invariant(ckm, stats):
    from diabetes_cdss import synthesize_cohort

    ds = synthesize_cohort(stats, 80, seed=23)
    full = {f.name for f in ds.schema}
    a, b = feature_set_comparison(ckm, ds, full, {"bmi", "hba1c", "fpg"})
    assert a == b  # the expert tree only tests key features


def test_masking_branching_feature_changes_concordance(stats):
    from diabetes_cdss import TrainHyperparams, synthesize_cohort, train_tree

    ds = synthesize_cohort(stats, 400, seed=24)
    pm = train_tree(ds, TrainHyperparams(min_leaf=2))
    assert "family_history" in pm.attributes_used()
    full = {f.name for f in ds.schema}
    a, b = feature_set_comparison(pm, ds, full, {"bmi", "hba1c", "fpg"})
    assert a > b  # masking branched-on features degrades agreement


def test_invalid_subset_rejected(ckm, stats):
    from diabetes_cdss import synthesize_cohort

    ds = synthesize_cohort(stats, 10, seed=25)
    with pytest.raises(InvalidSubsetError):
        feature_set_comparison(ckm, ds, {"bmi"}, {"bmi", "hba1c"})


# ---------------------------------------------------------------------------
# Reporting helpers

def test_divergence_flags_spot_mismatches():
    computed = {"prediabetes": 154 / 157, "at_risk": 120 / 121}
    quoted = {"prediabetes": 0.90, "at_risk": 0.99}
    flags = divergence_flags(computed, quoted, tol=0.005)
    assert len(flags) == 1
    assert "prediabetes" in flags[0]


def test_render_confusion_table_contains_counts():
    truth, pred = stream_from_counts(REFERENCE_COUNTS)
    cm = confusion_matrix(truth, pred)
    text = render_confusion_table(cm, title="hybrid")
    assert "212" in text and "154" in text
    assert "Sensitivity" in text and "Overall" in text


def test_render_age_table():
    from diabetes_cdss.metrics import BandReport

    text = render_age_table([BandReport(61, 80, 320, 315, 5)])
    assert "61-80 years" in text
    assert "320" in text and "315" in text and "5" in text
