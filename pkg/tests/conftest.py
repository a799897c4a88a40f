import pytest

from diabetes_cdss import (
    CohortDataset,
    GlycemicClass,
    PatientRecord,
    build_reference_ckm,
    reference_statistics,
)


@pytest.fixture(scope="session")
def ckm():
    return build_reference_ckm()


@pytest.fixture(scope="session")
def stats():
    return reference_statistics()


def make_record(rid="r", **kwargs):
    return PatientRecord(id=rid, **kwargs)


def make_dataset(rows, label_key="label"):
    """rows: list of dicts with feature values (+ optional label)."""
    records = []
    for i, row in enumerate(rows):
        row = dict(row)
        label = row.pop(label_key, None)
        records.append(PatientRecord(id=row.pop("id", f"r{i}"), label=label, **row))
    return CohortDataset(records=tuple(records), provenance="test")


@pytest.fixture
def labeled_toy_dataset():
    """Ten records, perfectly separable: fpg >= 126 -> diabetes."""
    rows = []
    for i in range(6):
        rows.append({"fpg": 130.0 + i, "hba1c": 7.0, "bmi": 28.0,
                     "label": GlycemicClass.VERIFIED_DIABETES})
    for i in range(4):
        rows.append({"fpg": 90.0 + i, "hba1c": 5.0, "bmi": 22.0,
                     "family_history": False, "physical_activity": "high",
                     "htn_medication": False,
                     "label": GlycemicClass.NO_DIABETES})
    return make_dataset(rows)
